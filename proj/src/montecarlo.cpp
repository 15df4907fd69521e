#include "bromimo/montecarlo.hpp"

#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

#include <Eigen/Dense>

#include "bromimo/decoder.hpp"
#include "bromimo/errors.hpp"
#include "bromimo/power.hpp"

namespace bromimo::montecarlo {

const char* decoder_name(Decoder d) { return d == Decoder::BRO ? "BRO" : "LS"; }

std::vector<std::string> ExperimentConfig::validate() const {
  std::vector<std::string> issues = system.validate();
  if (trials < 1) issues.push_back("trials must be >= 1");
  if (decoder_set.empty()) issues.push_back("decoder set must be non-empty");
  if (!(tol > 0.0)) issues.push_back("tol must be positive");
  if (max_iters < 1) issues.push_back("max_iters must be >= 1");
  return issues;
}

const DecoderStats* AggregateResult::find(Decoder d) const {
  for (const auto& [dec, stats] : decoders)
    if (dec == d) return &stats;
  return nullptr;
}

namespace {

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? static_cast<int>(hc) : 1;
}

void parallel_for_index(std::size_t count, int threads,
                        const std::function<void(std::size_t)>& fn) {
  const int workers = std::min<std::size_t>(resolve_threads(threads), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto work = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int t = 0; t < workers; ++t) pool.emplace_back(work);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

channel::ChannelRealization sample_for_path(const ExperimentConfig& config,
                                            const channel::ChannelStats& stats,
                                            std::uint64_t trial_index) {
  if (config.sampling_path == SamplingPath::PilotSimulation)
    return channel::sample_realization(config.system, stats, trial_index);

  const power::PowerSplit pw = power::powers_from_alpha(
      config.system.alpha, config.system.rho, config.system.tau, config.system.tau_p);
  if (!(pw.rho_d > 0.0)) throw solver_error("run_trial: rho_d must be positive");

  TrialRng rng(config.system.seed, trial_index);
  channel::ChannelRealization out;
  channel::sample_estimated_pair_direct(stats, config.system.n, rng, out.A_hat, out.Delta);
  out.A = out.A_hat - out.Delta;
  out.x0 = rng.rademacher_vector(config.system.n);
  out.z = rng.gaussian_vector(config.system.m);
  out.y = std::sqrt(pw.rho_d / config.system.n) * out.A * out.x0 + out.z;
  return out;
}

}  // namespace

TrialOutput run_trial(const ExperimentConfig& config, const channel::ChannelStats& stats,
                      std::uint64_t trial_index) {
  const channel::ChannelRealization real = sample_for_path(config, stats, trial_index);
  const power::PowerSplit pw = power::powers_from_alpha(
      config.system.alpha, config.system.rho, config.system.tau, config.system.tau_p);

  decoder::DecodeProblem problem{real.y, real.A_hat, pw.rho_d, config.system.n};
  TrialOutput out;
  out.reserve(config.decoder_set.size());
  for (Decoder d : config.decoder_set) {
    decoder::DecodeResult res = (d == Decoder::BRO)
                                    ? decoder::bro_solve(problem, config.tol, config.max_iters)
                                    : decoder::ls_solve(problem);
    DecoderTrial trial;
    trial.mse = decoder::mse_metric(res.x_relaxed, real.x0);
    trial.ber = decoder::ber_metric(res.x_detected, real.x0);
    trial.converged = res.converged;
    out.emplace_back(d, trial);
  }
  return out;
}

TrialOutput run_trial(const ExperimentConfig& config, std::uint64_t trial_index) {
  const power::PowerSplit pw = power::powers_from_alpha(
      config.system.alpha, config.system.rho, config.system.tau, config.system.tau_p);
  const Eigen::MatrixXd R =
      channel::build_correlation(config.system.corr_model, config.system.m, config.system.r);
  const channel::ChannelStats stats = channel::derive_stats(R, config.system.tau_p, pw.rho_p);
  return run_trial(config, stats, trial_index);
}

asymptotics::AsymptoticSolution predict(const channel::SystemConfig& config,
                                        std::optional<double> rho_p_override) {
  const power::PowerSplit pw =
      power::powers_from_alpha(config.alpha, config.rho, config.tau, config.tau_p);
  const double rho_p = rho_p_override.value_or(pw.rho_p);
  if (!(pw.rho_d > 0.0)) throw solver_error("predict: rho_d must be positive (alpha too small)");
  if (!(rho_p > 0.0)) throw solver_error("predict: rho_p must be positive (alpha too large)");

  const Eigen::MatrixXd R = channel::build_correlation(config.corr_model, config.m, config.r);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(R, Eigen::EigenvaluesOnly);

  asymptotics::AsymptoticInput in;
  channel::estimation_spectrum(es.eigenvalues().cwiseMax(0.0), config.tau_p, rho_p, in.lambda,
                               in.delta);
  in.rho_d = pw.rho_d;
  in.n = config.n;
  return asymptotics::solve_minmax(in);
}

AggregateResult run_experiment(const ExperimentConfig& config, int threads) {
  if (auto issues = config.validate(); !issues.empty()) throw validation_error(std::move(issues));

  const power::PowerSplit pw = power::powers_from_alpha(
      config.system.alpha, config.system.rho, config.system.tau, config.system.tau_p);
  if (!(pw.rho_d > 0.0)) throw solver_error("run_experiment: rho_d must be positive");
  if (!(pw.rho_p > 0.0)) throw solver_error("run_experiment: rho_p must be positive");

  const Eigen::MatrixXd R =
      channel::build_correlation(config.system.corr_model, config.system.m, config.system.r);
  const channel::ChannelStats stats = channel::derive_stats(R, config.system.tau_p, pw.rho_p);

  asymptotics::AsymptoticInput in{stats.lambda, stats.delta, pw.rho_d, config.system.n};
  AggregateResult agg;
  agg.theory = asymptotics::solve_minmax(in);

  std::vector<TrialOutput> results(config.trials);
  parallel_for_index(config.trials, threads,
                     [&](std::size_t i) { results[i] = run_trial(config, stats, i); });

  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (Decoder d : config.decoder_set) {
    DecoderStats st;
    st.n_trials = config.trials;
    double sum_mse = 0.0, sum_ber = 0.0;
    for (const auto& trial : results) {
      for (const auto& [dec, tr] : trial) {
        if (dec != d) continue;
        sum_mse += tr.mse;
        sum_ber += tr.ber;
        if (!tr.converged) ++st.n_nonconverged;
      }
    }
    st.mean_mse = sum_mse / config.trials;
    st.mean_ber = sum_ber / config.trials;
    if (config.trials > 1) {
      double ss_mse = 0.0, ss_ber = 0.0;
      for (const auto& trial : results) {
        for (const auto& [dec, tr] : trial) {
          if (dec != d) continue;
          ss_mse += (tr.mse - st.mean_mse) * (tr.mse - st.mean_mse);
          ss_ber += (tr.ber - st.mean_ber) * (tr.ber - st.mean_ber);
        }
      }
      const double denom = static_cast<double>(config.trials) * (config.trials - 1);
      st.std_err_mse = std::sqrt(ss_mse / denom);
      st.std_err_ber = std::sqrt(ss_ber / denom);
    } else {
      st.std_err_mse = nan;
      st.std_err_ber = nan;
    }
    agg.decoders.emplace_back(d, st);
  }
  return agg;
}

SweepParameter sweep_parameter_from_string(const std::string& name) {
  if (name == "rho_db") return SweepParameter::RhoDb;
  if (name == "r") return SweepParameter::R;
  if (name == "alpha") return SweepParameter::Alpha;
  if (name == "beta") return SweepParameter::Beta;
  throw std::invalid_argument("unknown sweep parameter: " + name);
}

const char* sweep_parameter_name(SweepParameter p) {
  switch (p) {
    case SweepParameter::RhoDb: return "rho_db";
    case SweepParameter::R: return "r";
    case SweepParameter::Alpha: return "alpha";
    case SweepParameter::Beta: return "beta";
  }
  return "?";
}

std::vector<SweepPoint> sweep(const ExperimentConfig& config, SweepParameter parameter,
                              const std::vector<double>& values, int threads) {
  if (values.empty()) throw std::invalid_argument("sweep: values must be non-empty");

  std::vector<SweepPoint> points;
  points.reserve(values.size());
  for (double v : values) {
    ExperimentConfig cfg = config;
    switch (parameter) {
      case SweepParameter::RhoDb:
        cfg.system.rho_db = v;
        cfg.system.rho = std::pow(10.0, v / 10.0);
        break;
      case SweepParameter::R:
        cfg.system.r = v;
        break;
      case SweepParameter::Alpha:
        cfg.system.alpha = v;
        break;
      case SweepParameter::Beta:
        cfg.system.beta = v;
        cfg.system.m = static_cast<int>(std::lround(v * config.system.n));
        break;
    }
    SweepPoint point;
    point.value = v;
    point.m = cfg.system.m;
    try {
      point.result = run_experiment(cfg, threads);
    } catch (const std::exception& e) {
      point.error = e.what();
    }
    points.push_back(std::move(point));
  }
  return points;
}

}  // namespace bromimo::montecarlo

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bromimo/decoder.hpp"
#include "bromimo/errors.hpp"
#include "bromimo/montecarlo.hpp"
#include "bromimo/power.hpp"

using namespace bromimo;
using namespace bromimo::montecarlo;
using bromimo::channel::CorrelationModel;
using bromimo::channel::SystemConfig;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.system = SystemConfig::from_db(32, 1.5, 2.5, 1.0, 10.0, 0.5,
                                     CorrelationModel::SquaredExponential, 0.2, 77);
  cfg.trials = 20;
  return cfg;
}

}  // namespace

TEST_CASE("run_trial is deterministic and overloads agree") {
  const ExperimentConfig cfg = small_config();
  const TrialOutput a = run_trial(cfg, 3);
  const TrialOutput b = run_trial(cfg, 3);
  REQUIRE(a.size() == b.size());
  CHECK(a[0].second.mse == b[0].second.mse);
  CHECK(a[0].second.ber == b[0].second.ber);

  const TrialOutput c = run_trial(cfg, 4);
  CHECK(a[0].second.mse != c[0].second.mse);
}

TEST_CASE("run_trial: noiseless-regime recovery is error-free") {
  ExperimentConfig cfg;
  cfg.system = SystemConfig::from_db(64, 2.0, 2.5, 1.0, 120.0, 0.5,
                                     CorrelationModel::SquaredExponential, 0.0, 5);
  cfg.trials = 5;
  for (int t = 0; t < 5; ++t) {
    const TrialOutput out = run_trial(cfg, t);
    CHECK(out[0].second.ber == 0.0);
  }
}

TEST_CASE("run_trial: both decoders see the identical realization") {
  ExperimentConfig cfg = small_config();
  cfg.decoder_set = {Decoder::BRO, Decoder::LS};
  cfg.sampling_path = SamplingPath::PilotSimulation;

  const auto pw = power::powers_from_alpha(cfg.system.alpha, cfg.system.rho, cfg.system.tau,
                                           cfg.system.tau_p);
  const Eigen::MatrixXd R =
      channel::build_correlation(cfg.system.corr_model, cfg.system.m, cfg.system.r);
  const channel::ChannelStats stats = channel::derive_stats(R, cfg.system.tau_p, pw.rho_p);

  const TrialOutput out = run_trial(cfg, stats, 11);
  REQUIRE(out.size() == 2);
  CHECK(out[0].first == Decoder::BRO);
  CHECK(out[1].first == Decoder::LS);

  // Reconstruct the same realization and run the LS decoder by hand.
  const channel::ChannelRealization real = channel::sample_realization(cfg.system, stats, 11);
  const decoder::DecodeResult ls =
      decoder::ls_solve({real.y, real.A_hat, pw.rho_d, cfg.system.n});
  CHECK(out[1].second.mse == decoder::mse_metric(ls.x_relaxed, real.x0));
  CHECK(out[1].second.ber == decoder::ber_metric(ls.x_detected, real.x0));
}

TEST_CASE("run_experiment aggregates and is thread-count invariant") {
  ExperimentConfig cfg = small_config();
  cfg.decoder_set = {Decoder::BRO, Decoder::LS};

  const AggregateResult serial = run_experiment(cfg, 1);
  const AggregateResult pooled = run_experiment(cfg, 4);

  REQUIRE(serial.decoders.size() == 2);
  for (std::size_t i = 0; i < serial.decoders.size(); ++i) {
    CHECK(serial.decoders[i].second.mean_mse == pooled.decoders[i].second.mean_mse);
    CHECK(serial.decoders[i].second.mean_ber == pooled.decoders[i].second.mean_ber);
    CHECK(serial.decoders[i].second.std_err_mse == pooled.decoders[i].second.std_err_mse);
  }

  const DecoderStats* bro = serial.find(Decoder::BRO);
  REQUIRE(bro != nullptr);
  CHECK(bro->n_trials == cfg.trials);
  CHECK(bro->n_nonconverged == 0);
  CHECK(bro->std_err_mse >= 0.0);
  CHECK(serial.theory.mu_star > 0.0);
}

TEST_CASE("run_experiment with one trial reports NaN standard errors") {
  ExperimentConfig cfg = small_config();
  cfg.trials = 1;
  const AggregateResult agg = run_experiment(cfg, 1);
  CHECK(std::isnan(agg.decoders[0].second.std_err_mse));
  CHECK(std::isnan(agg.decoders[0].second.std_err_ber));
}

TEST_CASE("run_experiment rejects invalid configs with full issue list") {
  ExperimentConfig cfg = small_config();
  cfg.system.beta = 0.4;
  cfg.trials = 0;
  CHECK_THROWS_AS(run_experiment(cfg, 1), validation_error);
  try {
    run_experiment(cfg, 1);
  } catch (const validation_error& e) {
    CHECK(e.issues().size() >= 2);
  }
}

TEST_CASE("empirical box-decoder error tracks the asymptotic prediction") {
  // Desk-scale version of the theory-vs-simulation match; the acceptance
  // suite runs the full-size grid.
  ExperimentConfig cfg;
  cfg.system = SystemConfig::from_db(400, 1.5, 2.5, 1.0, 10.0, 0.5,
                                     CorrelationModel::SquaredExponential, 0.2, 42);
  cfg.trials = 100;
  const AggregateResult agg = run_experiment(cfg, 0);
  const DecoderStats* bro = agg.find(Decoder::BRO);
  REQUIRE(bro != nullptr);
  CHECK(std::abs(bro->mean_mse - agg.theory.mse) <= 0.10 * agg.theory.mse);
}

TEST_CASE("two sampling paths agree statistically") {
  ExperimentConfig direct;
  direct.system = SystemConfig::from_db(64, 1.5, 2.5, 1.0, 10.0, 0.5,
                                        CorrelationModel::SquaredExponential, 0.3, 314);
  direct.trials = 200;
  direct.sampling_path = SamplingPath::DirectStatistical;

  ExperimentConfig pilot = direct;
  pilot.sampling_path = SamplingPath::PilotSimulation;
  pilot.system.seed = 315;

  const AggregateResult a = run_experiment(direct, 0);
  const AggregateResult b = run_experiment(pilot, 0);
  const DecoderStats* da = a.find(Decoder::BRO);
  const DecoderStats* db = b.find(Decoder::BRO);
  const double gap = std::abs(da->mean_mse - db->mean_mse);
  const double band = 3.0 * std::hypot(da->std_err_mse, db->std_err_mse);
  CHECK(gap <= band);
}

TEST_CASE("sweep: singleton equals run_experiment") {
  ExperimentConfig cfg = small_config();
  const auto points = sweep(cfg, SweepParameter::RhoDb, {10.0}, 1);
  REQUIRE(points.size() == 1);
  REQUIRE(points[0].error.empty());
  const AggregateResult direct = run_experiment(cfg, 1);
  CHECK(points[0].result->decoders[0].second.mean_mse == direct.decoders[0].second.mean_mse);
  CHECK(points[0].result->theory.mu_star == direct.theory.mu_star);
}

TEST_CASE("sweep: theoretical BER decreases with SNR") {
  ExperimentConfig cfg = small_config();
  cfg.trials = 1;
  const auto points = sweep(cfg, SweepParameter::RhoDb, {0.0, 5.0, 10.0, 15.0}, 1);
  double prev = 1.0;
  for (const auto& p : points) {
    REQUIRE(p.error.empty());
    CHECK(p.result->theory.ber < prev);
    prev = p.result->theory.ber;
  }
}

TEST_CASE("sweep: least-squares error peaks at the square system") {
  ExperimentConfig cfg;
  cfg.system = SystemConfig::from_db(100, 1.5, 2.5, 1.0, 10.0, 0.5,
                                     CorrelationModel::SquaredExponential, 0.2, 2718);
  cfg.trials = 30;
  cfg.decoder_set = {Decoder::BRO, Decoder::LS};
  const auto points = sweep(cfg, SweepParameter::Beta, {0.75, 1.0, 1.5}, 0);
  REQUIRE(points.size() == 3);
  for (const auto& p : points) REQUIRE(p.error.empty());
  CHECK(points[0].m == 75);
  CHECK(points[1].m == 100);
  CHECK(points[2].m == 150);

  const auto ls_mse = [&](int i) { return points[i].result->find(Decoder::LS)->mean_mse; };
  CHECK(ls_mse(1) > ls_mse(0));
  CHECK(ls_mse(1) > ls_mse(2));

  for (int i = 0; i < 3; ++i) {
    CHECK(points[i].result->find(Decoder::BRO)->mean_ber <=
          points[i].result->find(Decoder::LS)->mean_ber);
  }
}

TEST_CASE("sweep records per-point failures and continues") {
  ExperimentConfig cfg = small_config();
  const auto points = sweep(cfg, SweepParameter::Beta, {0.4, 1.5}, 1);
  REQUIRE(points.size() == 2);
  CHECK(!points[0].error.empty());
  CHECK(!points[0].result.has_value());
  CHECK(points[1].error.empty());
  REQUIRE(points[1].result.has_value());
}

TEST_CASE("sweep parameter names round-trip") {
  for (auto p : {SweepParameter::RhoDb, SweepParameter::R, SweepParameter::Alpha,
                 SweepParameter::Beta})
    CHECK(sweep_parameter_from_string(sweep_parameter_name(p)) == p);
  CHECK_THROWS_AS(sweep_parameter_from_string("bogus"), std::invalid_argument);
}

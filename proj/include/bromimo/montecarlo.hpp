#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bromimo/asymptotics.hpp"
#include "bromimo/channel.hpp"

namespace bromimo::montecarlo {

enum class Decoder { BRO, LS };
enum class SamplingPath { PilotSimulation, DirectStatistical };

const char* decoder_name(Decoder d);

struct ExperimentConfig {
  channel::SystemConfig system;
  int trials = 100;
  std::vector<Decoder> decoder_set{Decoder::BRO};
  SamplingPath sampling_path = SamplingPath::DirectStatistical;
  double tol = 1e-8;
  int max_iters = 20000;

  std::vector<std::string> validate() const;
};

struct DecoderTrial {
  double mse = 0.0;
  double ber = 0.0;
  bool converged = true;
};

using TrialOutput = std::vector<std::pair<Decoder, DecoderTrial>>;

// One seeded trial: sample a realization, run every requested decoder on the
// identical (y, A_hat). Deterministic in (system.seed, trial_index).
TrialOutput run_trial(const ExperimentConfig& config, const channel::ChannelStats& stats,
                      std::uint64_t trial_index);

// Convenience overload that derives the channel statistics itself.
TrialOutput run_trial(const ExperimentConfig& config, std::uint64_t trial_index);

struct DecoderStats {
  double mean_mse = 0.0;
  double mean_ber = 0.0;
  double std_err_mse = 0.0;  // NaN when trials == 1
  double std_err_ber = 0.0;
  int n_trials = 0;
  int n_nonconverged = 0;
};

struct AggregateResult {
  std::vector<std::pair<Decoder, DecoderStats>> decoders;
  asymptotics::AsymptoticSolution theory;

  const DecoderStats* find(Decoder d) const;
};

// Theory-only prediction for a config; rho_p_override replaces the pilot
// power when set (used for the perfect-CSI comparison).
asymptotics::AsymptoticSolution predict(const channel::SystemConfig& config,
                                        std::optional<double> rho_p_override = std::nullopt);

// Runs all trials (parallelizable, order-independent), aggregates means and
// standard errors, and attaches the asymptotic prediction. threads = 0 picks
// hardware concurrency.
AggregateResult run_experiment(const ExperimentConfig& config, int threads = 0);

enum class SweepParameter { RhoDb, R, Alpha, Beta };

SweepParameter sweep_parameter_from_string(const std::string& name);
const char* sweep_parameter_name(SweepParameter p);

struct SweepPoint {
  double value = 0.0;
  int m = 0;  // realized receive dimension at this point
  std::optional<AggregateResult> result;
  std::string error;  // non-empty when the point failed
};

// Re-derives dependent quantities per point (beta changes m and R, r rebuilds
// R, ...). Point failures are recorded and the sweep continues.
std::vector<SweepPoint> sweep(const ExperimentConfig& config, SweepParameter parameter,
                              const std::vector<double>& values, int threads = 0);

}  // namespace bromimo::montecarlo

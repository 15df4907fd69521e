#pragma once

#include <string>
#include <vector>

#include "bromimo/montecarlo.hpp"
#include "bromimo/power.hpp"

namespace bromimo::cli {

inline constexpr const char* kToolVersion = "1.0.0";

// Exit codes: one per failure family.
inline constexpr int kExitOk = 0;
inline constexpr int kExitParse = 2;
inline constexpr int kExitValidation = 3;
inline constexpr int kExitSolver = 4;
inline constexpr int kExitRuntime = 5;

enum class Format { Csv, Json };

Format format_from_string(const std::string& name);

// Reads a JSON experiment config, applies defaults (trials=100,
// decoders=[BRO], sampling_path=DirectStatistical, corr_model=
// SquaredExponential, tolerances tol=1e-8/max_iters=20000) and validates
// every invariant, reporting all violations at once.
montecarlo::ExperimentConfig parse_config(const std::string& path);

// 16-hex-digit digest of the canonically serialized config (key order in the
// file does not matter).
std::string config_hash(const std::string& path);

struct RunManifest {
  std::string config_hash;
  std::string tool_version;
  std::string started_at;
  std::string finished_at;
  std::vector<std::string> output_paths;

  std::string to_json() const;
};

// Renderers are pure: byte-identical output for identical inputs.
std::string render_predict(const montecarlo::ExperimentConfig& config, Format format,
                           bool perfect_csi);
std::string render_simulate(const montecarlo::ExperimentConfig& config, Format format,
                            int threads);
std::string render_power_opt(const montecarlo::ExperimentConfig& config,
                             power::Objective objective, int grid_points, Format format);
std::string render_sweep(const montecarlo::ExperimentConfig& config,
                         montecarlo::SweepParameter parameter, const std::vector<double>& values,
                         Format format, int threads, std::vector<std::string>* point_errors);

// Full command-line entry point (argv-style, without the program exiting).
int cli_main(int argc, const char* const* argv);

}  // namespace bromimo::cli

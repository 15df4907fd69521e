#include "bromimo/cli.hpp"

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "bromimo/errors.hpp"

namespace bromimo::cli {

using json = nlohmann::json;
using montecarlo::Decoder;
using montecarlo::ExperimentConfig;
using montecarlo::SamplingPath;

namespace {

std::string fmt_g(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string iso8601_utc(std::chrono::system_clock::time_point tp) {
  const std::time_t t = std::chrono::system_clock::to_time_t(tp);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open config file: " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw parse_error("config parse failure in " + path + ": " + e.what());
  }
}

const std::vector<std::string> kKnownKeys = {
    "n",      "beta",     "tau",      "tau_p",         "rho_db",     "alpha",
    "corr_model", "r",    "seed",     "trials",        "decoders",   "sampling_path",
    "tolerances"};

ExperimentConfig config_from_json(const json& j) {
  std::vector<std::string> issues;
  if (!j.is_object()) throw parse_error("config root must be a JSON object");

  for (const auto& [key, _] : j.items()) {
    if (std::find(kKnownKeys.begin(), kKnownKeys.end(), key) == kKnownKeys.end())
      issues.push_back("unknown key '" + key + "'");
  }

  auto require = [&](const char* key, auto check, auto fallback) {
    using T = decltype(fallback);
    if (!j.contains(key)) {
      issues.push_back(std::string("missing required key '") + key + "'");
      return fallback;
    }
    if (!check(j.at(key))) {
      issues.push_back(std::string("wrong type for key '") + key + "'");
      return fallback;
    }
    return j.at(key).template get<T>();
  };
  auto is_number = [](const json& v) { return v.is_number(); };
  auto is_int = [](const json& v) { return v.is_number_integer(); };
  auto is_uint = [](const json& v) { return v.is_number_unsigned() || v.is_number_integer(); };

  const int n = require("n", is_int, 0);
  const double beta = require("beta", is_number, 0.0);
  const double tau = require("tau", is_number, 0.0);
  const double tau_p = require("tau_p", is_number, 0.0);
  const double rho_db = require("rho_db", is_number, 0.0);
  const double alpha = require("alpha", is_number, 0.0);
  const double r = require("r", is_number, 0.0);
  const std::uint64_t seed = require("seed", is_uint, std::uint64_t{0});

  channel::CorrelationModel model = channel::CorrelationModel::SquaredExponential;
  if (j.contains("corr_model")) {
    const std::string name = j.at("corr_model").is_string() ? j.at("corr_model").get<std::string>() : "";
    if (name == "SquaredExponential")
      model = channel::CorrelationModel::SquaredExponential;
    else if (name == "Exponential")
      model = channel::CorrelationModel::Exponential;
    else if (name == "Identity")
      model = channel::CorrelationModel::Identity;
    else
      issues.push_back("unknown corr_model '" + name +
                       "' (expected SquaredExponential, Exponential or Identity)");
  }

  ExperimentConfig cfg;
  cfg.system = channel::SystemConfig::from_db(n, beta, tau, tau_p, rho_db, alpha, model, r, seed);

  if (j.contains("trials")) {
    if (!j.at("trials").is_number_integer())
      issues.push_back("wrong type for key 'trials'");
    else
      cfg.trials = j.at("trials").get<int>();
  }

  if (j.contains("decoders")) {
    cfg.decoder_set.clear();
    if (!j.at("decoders").is_array()) {
      issues.push_back("'decoders' must be an array of decoder names");
    } else {
      for (const auto& d : j.at("decoders")) {
        const std::string name = d.is_string() ? d.get<std::string>() : "";
        if (name == "BRO")
          cfg.decoder_set.push_back(Decoder::BRO);
        else if (name == "LS")
          cfg.decoder_set.push_back(Decoder::LS);
        else
          issues.push_back("unknown decoder '" + name + "' (expected BRO or LS)");
      }
    }
  }

  if (j.contains("sampling_path")) {
    const std::string name =
        j.at("sampling_path").is_string() ? j.at("sampling_path").get<std::string>() : "";
    if (name == "PilotSimulation")
      cfg.sampling_path = SamplingPath::PilotSimulation;
    else if (name == "DirectStatistical")
      cfg.sampling_path = SamplingPath::DirectStatistical;
    else
      issues.push_back("unknown sampling_path '" + name +
                       "' (expected PilotSimulation or DirectStatistical)");
  }

  if (j.contains("tolerances")) {
    const json& t = j.at("tolerances");
    if (!t.is_object()) {
      issues.push_back("'tolerances' must be an object with keys tol and/or max_iters");
    } else {
      for (const auto& [key, _] : t.items()) {
        if (key != "tol" && key != "max_iters")
          issues.push_back("unknown key 'tolerances." + key + "'");
      }
      if (t.contains("tol")) {
        if (!t.at("tol").is_number())
          issues.push_back("wrong type for key 'tolerances.tol'");
        else
          cfg.tol = t.at("tol").get<double>();
      }
      if (t.contains("max_iters")) {
        if (!t.at("max_iters").is_number_integer())
          issues.push_back("wrong type for key 'tolerances.max_iters'");
        else
          cfg.max_iters = t.at("max_iters").get<int>();
      }
    }
  }

  for (const auto& issue : cfg.validate()) issues.push_back(issue);
  if (!issues.empty()) throw validation_error(std::move(issues));
  return cfg;
}

std::string csv_escape_free(const std::string& s) { return s; }  // all fields are simple tokens

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string to_csv() const {
    std::string out;
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (i) out += ',';
      out += header[i];
    }
    out += '\n';
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) out += ',';
        out += csv_escape_free(row[i]);
      }
      out += '\n';
    }
    return out;
  }
};

json row_to_json(const Table& t, const std::vector<std::string>& row) {
  json obj = json::object();
  for (std::size_t i = 0; i < t.header.size(); ++i) {
    // Numeric-looking fields stay numeric in JSON.
    const std::string& cell = row[i];
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (end && *end == '\0' && !cell.empty())
      obj[t.header[i]] = v;
    else
      obj[t.header[i]] = cell;
  }
  return obj;
}

std::string table_to_output(const Table& t, Format format, const std::string& schema) {
  if (format == Format::Csv) return t.to_csv();
  json out;
  out["schema"] = schema;
  out["rows"] = json::array();
  for (const auto& row : t.rows) out["rows"].push_back(row_to_json(t, row));
  return out.dump(2) + "\n";
}

int resolve_env_threads() {
  const char* env = std::getenv("BRO_MIMO_THREADS");
  if (!env || !*env) return 0;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (!end || *end != '\0' || v < 0)
    throw validation_error({std::string("BRO_MIMO_THREADS must be a non-negative integer, got '") +
                            env + "'"});
  return static_cast<int>(v);
}

}  // namespace

Format format_from_string(const std::string& name) {
  if (name == "csv") return Format::Csv;
  if (name == "json") return Format::Json;
  throw validation_error({"unknown format '" + name + "' (expected csv or json)"});
}

ExperimentConfig parse_config(const std::string& path) {
  return config_from_json(load_json_file(path));
}

std::string config_hash(const std::string& path) {
  // nlohmann objects serialize with sorted keys, so the digest is stable
  // under key reordering in the file.
  return hex64(fnv1a64(load_json_file(path).dump()));
}

std::string RunManifest::to_json() const {
  json j;
  j["config_hash"] = config_hash;
  j["tool_version"] = tool_version;
  j["started_at"] = started_at;
  j["finished_at"] = finished_at;
  j["output_paths"] = output_paths;
  return j.dump(2) + "\n";
}

std::string render_predict(const ExperimentConfig& config, Format format, bool perfect_csi) {
  std::optional<double> rho_p_override;
  if (perfect_csi) rho_p_override = 1e12;
  const asymptotics::AsymptoticSolution sol = montecarlo::predict(config.system, rho_p_override);

  Table t;
  t.header = {"rho_db", "r", "alpha", "beta", "mu_star", "gamma_star", "mse_theory", "ber_theory"};
  t.rows.push_back({fmt_g(config.system.rho_db), fmt_g(config.system.r), fmt_g(config.system.alpha),
                    fmt_g(config.system.beta), fmt_g(sol.mu_star), fmt_g(sol.gamma_star),
                    fmt_g(sol.mse), fmt_g(sol.ber)});
  return table_to_output(t, format, "bro-mimo/predict/v1");
}

namespace {

void append_decoder_rows(Table& t, const ExperimentConfig& config,
                         const montecarlo::AggregateResult& agg,
                         const std::vector<std::string>& prefix) {
  for (const auto& [dec, st] : agg.decoders) {
    std::vector<std::string> row = prefix;
    row.push_back(montecarlo::decoder_name(dec));
    row.push_back(fmt_g(st.mean_mse));
    row.push_back(fmt_g(st.std_err_mse));
    row.push_back(fmt_g(st.mean_ber));
    row.push_back(fmt_g(st.std_err_ber));
    row.push_back(std::to_string(st.n_trials));
    row.push_back(std::to_string(st.n_nonconverged));
    row.push_back(fmt_g(agg.theory.mse));
    row.push_back(fmt_g(agg.theory.ber));
    t.rows.push_back(std::move(row));
  }
  (void)config;
}

}  // namespace

std::string render_simulate(const ExperimentConfig& config, Format format, int threads) {
  const montecarlo::AggregateResult agg = montecarlo::run_experiment(config, threads);
  Table t;
  t.header = {"rho_db", "r",        "alpha",       "beta",     "decoder",
              "mean_mse", "std_err_mse", "mean_ber", "std_err_ber",
              "n_trials", "n_nonconverged", "mse_theory", "ber_theory"};
  const std::vector<std::string> prefix = {fmt_g(config.system.rho_db), fmt_g(config.system.r),
                                           fmt_g(config.system.alpha), fmt_g(config.system.beta)};
  append_decoder_rows(t, config, agg, prefix);
  return table_to_output(t, format, "bro-mimo/simulate/v1");
}

std::string render_power_opt(const ExperimentConfig& config, power::Objective objective,
                             int grid_points, Format format) {
  const power::AllocationCurve curve =
      power::optimize_alpha(config.system, objective, grid_points);

  if (format == Format::Csv) {
    Table t;
    t.header = {"kind", "alpha", "mse", "ber"};
    for (Eigen::Index i = 0; i < curve.alphas.size(); ++i)
      t.rows.push_back({"grid", fmt_g(curve.alphas(i)), fmt_g(curve.mse_values(i)),
                        fmt_g(curve.ber_values(i))});
    t.rows.push_back({"alpha_star_mse", fmt_g(curve.alpha_star_mse), "", ""});
    t.rows.push_back({"alpha_star_ber", fmt_g(curve.alpha_star_ber), "", ""});
    return t.to_csv();
  }

  json out;
  out["schema"] = "bro-mimo/power-opt/v1";
  out["curve"] = json::array();
  for (Eigen::Index i = 0; i < curve.alphas.size(); ++i)
    out["curve"].push_back({{"alpha", curve.alphas(i)},
                            {"mse", curve.mse_values(i)},
                            {"ber", curve.ber_values(i)}});
  out["summary"] = {{"alpha_star_mse", curve.alpha_star_mse},
                    {"alpha_star_ber", curve.alpha_star_ber},
                    {"unimodal_mse", curve.unimodal_mse},
                    {"unimodal_ber", curve.unimodal_ber},
                    {"objective", objective == power::Objective::MSE ? "mse" : "ber"}};
  return out.dump(2) + "\n";
}

std::string render_sweep(const ExperimentConfig& config, montecarlo::SweepParameter parameter,
                         const std::vector<double>& values, Format format, int threads,
                         std::vector<std::string>* point_errors) {
  const std::vector<montecarlo::SweepPoint> points =
      montecarlo::sweep(config, parameter, values, threads);

  Table t;
  t.header = {"param", "value", "m",        "decoder",  "mean_mse", "std_err_mse",
              "mean_ber", "std_err_ber", "n_trials", "n_nonconverged", "mse_theory",
              "ber_theory"};
  for (const auto& point : points) {
    if (!point.error.empty()) {
      if (point_errors)
        point_errors->push_back(std::string(montecarlo::sweep_parameter_name(parameter)) + "=" +
                                fmt_g(point.value) + ": " + point.error);
      continue;
    }
    const std::vector<std::string> prefix = {montecarlo::sweep_parameter_name(parameter),
                                             fmt_g(point.value), std::to_string(point.m)};
    append_decoder_rows(t, config, *point.result, prefix);
  }

  if (format == Format::Csv) return t.to_csv();

  json out;
  out["schema"] = "bro-mimo/sweep/v1";
  out["rows"] = json::array();
  for (const auto& row : t.rows) out["rows"].push_back(row_to_json(t, row));
  out["errors"] = json::array();
  for (const auto& point : points)
    if (!point.error.empty())
      out["errors"].push_back({{"value", point.value}, {"message", point.error}});
  return out.dump(2) + "\n";
}

namespace {

void write_output(const std::string& text, const std::string& out_path,
                  const std::string& cfg_hash, const std::string& started) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write output file: " + out_path);
    out << text;
  }
  RunManifest manifest;
  manifest.config_hash = cfg_hash;
  manifest.tool_version = kToolVersion;
  manifest.started_at = started;
  manifest.finished_at = iso8601_utc(std::chrono::system_clock::now());
  manifest.output_paths = {out_path};
  const std::string manifest_path = out_path + ".manifest.json";
  std::ofstream mout(manifest_path, std::ios::binary);
  if (!mout) throw std::runtime_error("cannot write manifest file: " + manifest_path);
  mout << manifest.to_json();
}

std::vector<double> parse_values_list(const std::string& csv) {
  std::vector<double> values;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    char* end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    if (!end || *end != '\0')
      throw validation_error({"--values entry '" + item + "' is not a number"});
    values.push_back(v);
  }
  if (values.empty()) throw validation_error({"--values must contain at least one number"});
  return values;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"Box-relaxation decoding of BPSK over correlated massive MIMO: "
               "asymptotic predictions, Monte Carlo simulation, and pilot/data "
               "power allocation"};
  app.require_subcommand(1);

  std::string config_path, out_path;
  std::string format_name = "csv";
  bool perfect_csi = false;
  std::string objective_name = "mse";
  int grid_points = 41;
  std::string param_name, values_csv;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "experiment config (JSON)")->required();
    sub->add_option("--out", out_path, "output file (default: stdout)");
    sub->add_option("--format", format_name, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
  };

  CLI::App* predict = app.add_subcommand("predict", "asymptotic MSE/BER prediction");
  add_common(predict);
  predict->add_flag("--perfect-csi", perfect_csi,
                    "replace the pilot power with 1e12 (perfect-knowledge limit)");

  CLI::App* simulate = app.add_subcommand("simulate", "seeded Monte Carlo experiment");
  add_common(simulate);

  CLI::App* power_opt = app.add_subcommand("power-opt", "optimize the data power fraction");
  add_common(power_opt);
  power_opt->add_option("--objective", objective_name, "mse or ber")
      ->check(CLI::IsMember({"mse", "ber"}));
  power_opt->add_option("--grid", grid_points, "alpha grid points (default 41)")
      ->check(CLI::PositiveNumber);

  CLI::App* sweep = app.add_subcommand("sweep", "sweep one parameter");
  add_common(sweep);
  sweep->add_option("--param", param_name, "rho_db, r, alpha or beta")->required();
  sweep->add_option("--values", values_csv, "comma-separated values")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitParse;
  }

  const std::string started = iso8601_utc(std::chrono::system_clock::now());
  try {
    const int threads = resolve_env_threads();
    const Format format = format_from_string(format_name);
    const ExperimentConfig config = parse_config(config_path);
    const std::string cfg_hash = config_hash(config_path);

    std::string text;
    if (predict->parsed()) {
      text = render_predict(config, format, perfect_csi);
    } else if (simulate->parsed()) {
      text = render_simulate(config, format, threads);
    } else if (power_opt->parsed()) {
      if (grid_points < 3) throw validation_error({"--grid must be at least 3"});
      const power::Objective obj =
          objective_name == "ber" ? power::Objective::BER : power::Objective::MSE;
      text = render_power_opt(config, obj, grid_points, format);
    } else if (sweep->parsed()) {
      const montecarlo::SweepParameter param = montecarlo::sweep_parameter_from_string(param_name);
      std::vector<std::string> point_errors;
      text = render_sweep(config, param, parse_values_list(values_csv), format, threads,
                          &point_errors);
      for (const auto& err : point_errors) std::cerr << "sweep point failed: " << err << "\n";
    }
    write_output(text, out_path, cfg_hash, started);
    return kExitOk;
  } catch (const parse_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const validation_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const solver_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace bromimo::cli

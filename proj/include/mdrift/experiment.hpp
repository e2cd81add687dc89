#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <json.hpp>
#include <string>
#include <vector>

#include "mdrift/core.hpp"
#include "mdrift/estimator.hpp"

namespace mdrift {

enum class Scenario { MolchanJ, BlackScholes, Fsv };

/// Flat experiment description; every field has a `key = value` spelling (see set_config_value).
///
/// `steps` follows the usual convention of each scenario: per path for molchan-J,
/// over the whole observed span [0, N T] for black-scholes, and per copy window
/// of length T for fsv.
struct ExperimentConfig {
  Scenario scenario = Scenario::MolchanJ;
  double hurst = 0.6;
  double horizon = 1.0;
  std::size_t copies = 100;
  std::size_t steps = 5000;
  std::size_t m_min = 2;
  std::size_t m_max = 12;
  PenaltyConfig penalty;
  std::size_t repetitions = 100;
  std::uint64_t seed = 1;
  std::string target = "J01";
  bool skip_origin = true;
  // black-scholes
  double sigma = 0.2;
  double s0 = 10.0;
  // fsv
  double upsilon = 0.3;
  double sigma0 = 0.2;
  double gap = 5.0;
  std::string price_drift = "0";
  std::size_t stride = 1;
  std::size_t rho_points = 50;
  std::size_t order = 64;
  // curves.csv resolution
  std::size_t curve_points = 201;
};

/// Applies one key/value pair; throws ConfigError on unknown keys or invalid values.
void set_config_value(ExperimentConfig& config, const std::string& key, const std::string& value);

/// Parses "key = value" lines ('#' starts a comment) on top of `base`.
ExperimentConfig parse_config(const std::string& text, ExperimentConfig base = {});
ExperimentConfig load_config(const std::filesystem::path& file, ExperimentConfig base = {});

/// Scenario defaults (skip_origin, target, steps...) applied when the scenario is chosen.
ExperimentConfig scenario_defaults(Scenario scenario);

/// Throws ConfigError on invalid combinations; returns advisory warnings (e.g. n far from N^2).
std::vector<std::string> validate(const ExperimentConfig& config);

nlohmann::ordered_json to_json(const ExperimentConfig& config);
std::string scenario_name(Scenario scenario);

/// Builtin targets J01 = 10 t^2, J02 = 10 sqrt(-log t), J03 = 20 t^{-0.05},
/// b = sin(2 pi t) + cos(2 pi t), zero; anything else is parsed as an expression in t.
RealFunction target_function(const std::string& name);

struct RepetitionResult {
  std::size_t rep = 0;
  bool ok = false;
  std::string error;
  std::size_t m_hat = 0;
  double mise_qv = 0.0;
  double mise_l2 = 0.0;
  double c_cal = 0.0;
  double sigma_hat = 0.0;       // black-scholes only
  double mise_sigma_hat = 0.0;  // black-scholes only
  std::vector<double> curve;    // estimate on ExperimentReport::curve_times
};

struct Aggregate {
  std::size_t count = 0;
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation over repetitions
};

Aggregate aggregate(std::span<const double> values);

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<RepetitionResult> reps;
  std::vector<double> curve_times;
  std::vector<double> truth_curve;
  double wall_seconds = 0.0;
  std::size_t threads = 1;

  bool partial() const;
  std::size_t completed() const;
};

/// Runs config.repetitions independent repetitions (simulate, select, score).
/// Repetition r uses RNG streams r * N + i; results do not depend on `threads`.
ExperimentReport run_experiment(const ExperimentConfig& config, std::size_t threads = 1);

/// Creates `dir` and checks it is writable; throws IoError otherwise.
void ensure_writable(const std::filesystem::path& dir);

/// Writes results.csv, summary.json, curves.csv (deterministic) and timing.json.
void emit_outputs(const ExperimentReport& report, const std::filesystem::path& dir);

nlohmann::ordered_json summary_json(const ExperimentReport& report);

struct LoadedReport {
  std::vector<RepetitionResult> rows;
  nlohmann::ordered_json summary;
};

/// Reads results.csv and summary.json and checks that the summary aggregates equal the
/// aggregates recomputed from the rows (to 1e-12 relative); throws IoError otherwise.
LoadedReport load_report(const std::filesystem::path& dir);

}  // namespace mdrift

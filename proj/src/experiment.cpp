#include "mdrift/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <thread>

#include "mdrift/apps.hpp"
#include "mdrift/basis.hpp"
#include "mdrift/csv.hpp"
#include "mdrift/expression.hpp"
#include "mdrift/fracops.hpp"
#include "mdrift/simulate.hpp"

namespace mdrift {

namespace {

constexpr int kFormatVersion = 1;
constexpr std::size_t kCurveColumns = 10;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(value, &used);
  } catch (const std::exception&) {
    throw ConfigError("invalid number for '" + key + "': " + value);
  }
  if (used != value.size() || !std::isfinite(x))
    throw ConfigError("invalid number for '" + key + "': " + value);
  return x;
}

std::uint64_t parse_unsigned(const std::string& key, const std::string& value) {
  if (value.empty() || value.find_first_not_of("0123456789") != std::string::npos)
    throw ConfigError("invalid non-negative integer for '" + key + "': " + value);
  try {
    return std::stoull(value);
  } catch (const std::exception&) {
    throw ConfigError("integer out of range for '" + key + "': " + value);
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError("invalid boolean for '" + key + "': " + value);
}

Scenario parse_scenario(const std::string& value) {
  if (value == "molchan-J") return Scenario::MolchanJ;
  if (value == "black-scholes") return Scenario::BlackScholes;
  if (value == "fsv") return Scenario::Fsv;
  throw ConfigError("unknown scenario: " + value);
}

std::vector<double> linspace(double a, double b, std::size_t points) {
  std::vector<double> out(points);
  for (std::size_t k = 0; k < points; ++k)
    out[k] = points == 1 ? b : a + (b - a) * static_cast<double>(k) / static_cast<double>(points - 1);
  return out;
}

std::vector<std::size_t> dimensions(const ExperimentConfig& c) {
  std::vector<std::size_t> dims;
  for (std::size_t m = c.m_min; m <= c.m_max; ++m) dims.push_back(m);
  return dims;
}

// Shared, read-only state of one experiment.
struct Plan {
  ExperimentConfig config;
  RealFunction truth;
  std::vector<std::size_t> dims;
  BasisFamily family;
  std::vector<double> curve_times;
  // molchan-J
  std::optional<QuadVarModel> qv;
  std::optional<TimeGrid> grid;
  std::vector<double> drift_incr;
  std::optional<GramMatrix> gram;
  std::optional<DesignTable> table;
  // fsv
  std::optional<FracStochVolModel> fsv;
  std::optional<FunctionOnGrid> truth_j;  // J(rho0) / upsilon
  std::vector<double> rho_times;
};

Plan make_plan(const ExperimentConfig& c) {
  Plan p{c, target_function(c.target), dimensions(c),
         BasisFamily::trigonometric(c.horizon, c.m_max), {}, {}, {}, {}, {}, {}, {}, {}, {}};
  switch (c.scenario) {
    case Scenario::MolchanJ: {
      p.qv = QuadVarModel::molchan(c.hurst, c.horizon);
      p.grid = TimeGrid(c.horizon, c.steps, c.skip_origin);
      p.drift_incr = drift_increments(p.truth, *p.qv, *p.grid);
      p.gram = gram_matrix(p.family, c.m_max, *p.qv, p.grid->start());
      p.table = DesignTable(p.family, c.m_max, *p.grid);
      p.curve_times = linspace(p.grid->start(), c.horizon, c.curve_points);
      if (p.curve_times.front() == 0.0 && !std::isfinite(p.truth(0.0)))
        p.curve_times.front() = c.horizon / static_cast<double>(c.steps);
      break;
    }
    case Scenario::BlackScholes:
      p.curve_times = linspace(0.0, c.horizon, c.curve_points);
      break;
    case Scenario::Fsv: {
      const double step = c.horizon / static_cast<double>(c.steps);
      const auto n = static_cast<double>(c.copies) * (c.horizon + c.gap) / step;
      const TimeGrid total(static_cast<double>(c.copies) * (c.horizon + c.gap),
                           static_cast<std::size_t>(std::llround(n)));
      p.grid = total;
      p.fsv = FracStochVolModel{c.s0, c.sigma0, c.upsilon, c.hurst, parse_expression(c.price_drift),
                                p.truth, c.gap};
      p.qv = QuadVarModel::molchan(c.hurst, c.horizon);
      p.rho_times = output_times(c.horizon, c.rho_points);
      p.curve_times = p.rho_times;
      const auto fine = linspace(c.horizon / static_cast<double>(c.steps), c.horizon, 401);
      const FunctionOnGrid j = forward_J(p.truth, fine, c.horizon, c.hurst, {c.order, 2048});
      std::vector<double> scaled = j.values();
      for (double& v : scaled) v /= c.upsilon;
      p.truth_j = FunctionOnGrid(fine, std::move(scaled));
      break;
    }
  }
  return p;
}

void run_molchan(const Plan& p, std::size_t rep, RepetitionResult& r) {
  const auto& c = p.config;
  const Ensemble ens = simulate_z_ensemble(p.drift_incr, *p.qv, *p.grid, c.copies, c.seed,
                                           static_cast<std::uint64_t>(rep) * c.copies);
  const Eigen::VectorXd z = p.table->project(pooled_increments(ens));
  const FitResult fit = select_from_projection(z, *p.gram, p.dims, c.copies, c.penalty);
  const BasisFamily& family = p.family;
  const RealFunction est = [&](double t) { return fit.value(family, t); };
  r.m_hat = fit.dimension;
  r.c_cal = fit.c_cal;
  r.mise_qv = mise(est, p.truth, *p.qv, Norm::QuadVar, p.grid->start(), c.horizon);
  r.mise_l2 = mise(est, p.truth, *p.qv, Norm::L2, p.grid->start(), c.horizon);
  for (double t : p.curve_times) r.curve.push_back(est(t));
}

void run_black_scholes(const Plan& p, std::size_t rep, RepetitionResult& r) {
  const auto& c = p.config;
  const TimeGrid total(static_cast<double>(c.copies) * c.horizon, c.steps);
  RngStream rng(c.seed, static_cast<std::uint64_t>(rep) * c.copies);
  const SamplePath prices = simulate_black_scholes({c.s0, c.sigma, p.truth}, total, rng);
  const Ensemble copies = segment(prices, c.copies, c.horizon, 0.0, c.skip_origin);
  const QuadVarModel leb = QuadVarModel::lebesgue(c.horizon);
  const double start = copies.grid().start();

  const DriftEstimate known = estimate_drift_bs(bs_build_z(copies, c.sigma), p.family, p.dims,
                                                c.sigma, c.penalty);
  const RealFunction est = [&](double t) { return known(t); };
  r.m_hat = known.fit.dimension;
  r.c_cal = known.fit.c_cal;
  r.mise_l2 = mise(est, p.truth, leb, Norm::L2, start, c.horizon);
  r.mise_qv = r.mise_l2;
  for (double t : p.curve_times) r.curve.push_back(est(t));

  r.sigma_hat = estimate_sigma(prices);
  const DriftEstimate plug = estimate_drift_bs(bs_build_z(copies, r.sigma_hat), p.family, p.dims,
                                               r.sigma_hat, c.penalty);
  r.mise_sigma_hat = mise([&](double t) { return plug(t); }, p.truth, leb, Norm::L2, start,
                          c.horizon);
}

void run_fsv(const Plan& p, std::size_t rep, RepetitionResult& r) {
  const auto& c = p.config;
  RngStream rng(c.seed, static_cast<std::uint64_t>(rep) * c.copies);
  const FsvPaths paths = simulate_fsv(*p.fsv, *p.grid, rng);
  const Ensemble vols = segment(paths.vol, c.copies, c.horizon, c.gap, c.skip_origin);
  const Ensemble z = fsv_build_z(vols, c.upsilon, c.hurst, c.stride);
  const RhoEstimate est =
      estimate_rho(z, p.family, p.dims, c.upsilon, c.hurst, c.penalty, p.rho_times, c.order);
  const BasisFamily& family = p.family;
  const FitResult& fit = est.fit;
  r.m_hat = fit.dimension;
  r.c_cal = fit.c_cal;
  const FunctionOnGrid& rho = est.rho;
  r.mise_l2 = mise([&](double t) { return rho(t); }, p.truth, *p.qv, Norm::L2,
                   p.rho_times.front(), c.horizon);
  const FunctionOnGrid& tj = *p.truth_j;
  r.mise_qv = mise([&](double t) { return fit.value(family, t); }, [&](double t) { return tj(t); },
                   *p.qv, Norm::QuadVar, z.grid().start(), c.horizon);
  r.curve = rho.values();
}

RepetitionResult run_one(const Plan& p, std::size_t rep) {
  RepetitionResult r;
  r.rep = rep;
  r.sigma_hat = std::numeric_limits<double>::quiet_NaN();
  r.mise_sigma_hat = std::numeric_limits<double>::quiet_NaN();
  try {
    switch (p.config.scenario) {
      case Scenario::MolchanJ: run_molchan(p, rep, r); break;
      case Scenario::BlackScholes: run_black_scholes(p, rep, r); break;
      case Scenario::Fsv: run_fsv(p, rep, r); break;
    }
    r.ok = true;
  } catch (const Error& e) {
    r.ok = false;
    r.error = e.what();
    r.curve.clear();
  }
  return r;
}

std::string cell(double x) { return std::isfinite(x) ? csv::format(x) : std::string(); }

nlohmann::ordered_json aggregate_json(const Aggregate& a) {
  nlohmann::ordered_json j;
  j["count"] = a.count;
  j["mean"] = a.mean;
  j["std"] = a.std;
  return j;
}

template <class Get>
Aggregate aggregate_of(const std::vector<RepetitionResult>& reps, Get get) {
  std::vector<double> v;
  for (const auto& r : reps)
    if (r.ok && std::isfinite(get(r))) v.push_back(get(r));
  return aggregate(v);
}

using Getter = double (*)(const RepetitionResult&);
const std::pair<const char*, Getter> kColumns[] = {
    {"m_hat", [](const RepetitionResult& r) { return static_cast<double>(r.m_hat); }},
    {"mise_qv", [](const RepetitionResult& r) { return r.mise_qv; }},
    {"mise_l2", [](const RepetitionResult& r) { return r.mise_l2; }},
    {"c_cal", [](const RepetitionResult& r) { return r.c_cal; }},
    {"sigma_hat", [](const RepetitionResult& r) { return r.sigma_hat; }},
    {"mise_sigma_hat", [](const RepetitionResult& r) { return r.mise_sigma_hat; }},
};

void write_text(const std::filesystem::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw IoError("cannot write " + file.string());
  out << text;
  if (!out) throw IoError("write failed: " + file.string());
}

}  // namespace

std::string scenario_name(Scenario scenario) {
  switch (scenario) {
    case Scenario::MolchanJ: return "molchan-J";
    case Scenario::BlackScholes: return "black-scholes";
    case Scenario::Fsv: return "fsv";
  }
  return "molchan-J";
}

ExperimentConfig scenario_defaults(Scenario scenario) {
  ExperimentConfig c;
  c.scenario = scenario;
  switch (scenario) {
    case Scenario::MolchanJ:
      break;
    case Scenario::BlackScholes:
      c.hurst = 0.5;
      c.steps = 10000;
      c.target = "b";
      c.skip_origin = false;
      break;
    case Scenario::Fsv:
      c.hurst = 0.75;
      c.copies = 50;
      c.steps = 500;
      c.target = "b";
      c.skip_origin = false;
      c.gap = 5.0 * c.horizon;
      break;
  }
  return c;
}

void set_config_value(ExperimentConfig& c, const std::string& key, const std::string& raw) {
  const std::string value = trim(raw);
  if (key == "scenario") {
    // Switching scenario resets the scenario-specific defaults; later keys override them.
    const ExperimentConfig d = scenario_defaults(parse_scenario(value));
    ExperimentConfig keep = c;
    c = d;
    c.seed = keep.seed;
    c.repetitions = keep.repetitions;
  } else if (key == "H") {
    c.hurst = parse_double(key, value);
  } else if (key == "T") {
    const double old = c.horizon;
    c.horizon = parse_double(key, value);
    if (c.gap == 5.0 * old) c.gap = 5.0 * c.horizon;
  } else if (key == "N") {
    c.copies = parse_unsigned(key, value);
  } else if (key == "n") {
    c.steps = parse_unsigned(key, value);
  } else if (key == "m_min") {
    c.m_min = parse_unsigned(key, value);
  } else if (key == "m_max") {
    c.m_max = parse_unsigned(key, value);
  } else if (key == "penalty") {
    if (value == "slope") c.penalty.mode = PenaltyMode::SlopeHeuristic;
    else if (value == "fixed") c.penalty.mode = PenaltyMode::Fixed;
    else throw ConfigError("penalty must be 'slope' or 'fixed': " + value);
  } else if (key == "c_cal") {
    c.penalty.c_cal = parse_double(key, value);
  } else if (key == "slope_fraction") {
    c.penalty.window_fraction = parse_double(key, value);
  } else if (key == "reps") {
    c.repetitions = parse_unsigned(key, value);
  } else if (key == "seed") {
    c.seed = parse_unsigned(key, value);
  } else if (key == "target") {
    c.target = value;
  } else if (key == "skip_origin") {
    c.skip_origin = parse_bool(key, value);
  } else if (key == "sigma") {
    c.sigma = parse_double(key, value);
  } else if (key == "S0") {
    c.s0 = parse_double(key, value);
  } else if (key == "upsilon") {
    c.upsilon = parse_double(key, value);
  } else if (key == "sigma0") {
    c.sigma0 = parse_double(key, value);
  } else if (key == "delta") {
    c.gap = parse_double(key, value);
  } else if (key == "price_drift") {
    c.price_drift = value;
  } else if (key == "stride") {
    c.stride = parse_unsigned(key, value);
  } else if (key == "rho_points") {
    c.rho_points = parse_unsigned(key, value);
  } else if (key == "order") {
    c.order = parse_unsigned(key, value);
  } else if (key == "curve_points") {
    c.curve_points = parse_unsigned(key, value);
  } else {
    throw ConfigError("unknown configuration key: " + key);
  }
}

ExperimentConfig parse_config(const std::string& text, ExperimentConfig base) {
  std::istringstream in(text);
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(number) + ": expected key = value");
    set_config_value(base, trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  return base;
}

ExperimentConfig load_config(const std::filesystem::path& file, ExperimentConfig base) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot read config file " + file.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), std::move(base));
}

std::vector<std::string> validate(const ExperimentConfig& c) {
  if (!(c.horizon > 0.0)) throw ConfigError("T must be positive");
  if (!(c.hurst >= 0.5 && c.hurst < 1.0)) throw ConfigError("H must lie in [1/2, 1)");
  if (c.copies < 1) throw ConfigError("N must be at least 1");
  if (c.steps < 2) throw ConfigError("n must be at least 2");
  if (c.repetitions < 1) throw ConfigError("reps must be at least 1");
  if (c.m_min < 1 || c.m_max < c.m_min) throw ConfigError("need 1 <= m_min <= m_max");
  if (c.m_max > c.copies) throw ConfigError("m_max must not exceed N");
  if (!(c.penalty.c_cal >= 0.0)) throw ConfigError("c_cal must be non-negative");
  if (!(c.penalty.window_fraction > 0.0 && c.penalty.window_fraction <= 1.0))
    throw ConfigError("slope_fraction must lie in (0, 1]");
  if (c.curve_points < 2) throw ConfigError("curve_points must be at least 2");
  (void)target_function(c.target);
  std::vector<std::string> warnings;
  switch (c.scenario) {
    case Scenario::MolchanJ:
      break;
    case Scenario::BlackScholes:
      if (!(c.sigma > 0.0) || !(c.s0 > 0.0)) throw ConfigError("sigma and S0 must be positive");
      if (c.steps % c.copies != 0) throw ConfigError("n must be a multiple of N");
      break;
    case Scenario::Fsv: {
      if (!(c.upsilon > 0.0) || !(c.sigma0 > 0.0) || !(c.s0 > 0.0))
        throw ConfigError("upsilon, sigma0 and S0 must be positive");
      if (!(c.gap >= 0.0)) throw ConfigError("delta must be non-negative");
      const double cells = c.gap / (c.horizon / static_cast<double>(c.steps));
      if (std::abs(cells - std::round(cells)) > 1e-9)
        throw ConfigError("delta must be a whole number of steps T/n");
      if (c.stride < 1 || c.steps % c.stride != 0)
        throw ConfigError("stride must divide n");
      if (c.rho_points < 2) throw ConfigError("rho_points must be at least 2");
      (void)parse_expression(c.price_drift);
      break;
    }
  }
  const double ratio = static_cast<double>(c.steps) /
                       (static_cast<double>(c.copies) * static_cast<double>(c.copies));
  if (ratio < 0.25 || ratio > 4.0)
    warnings.push_back("n = " + std::to_string(c.steps) + " is far from N^2 = " +
                       std::to_string(c.copies * c.copies));
  return warnings;
}

nlohmann::ordered_json to_json(const ExperimentConfig& c) {
  nlohmann::ordered_json j;
  j["scenario"] = scenario_name(c.scenario);
  j["H"] = c.hurst;
  j["T"] = c.horizon;
  j["N"] = c.copies;
  j["n"] = c.steps;
  j["m_min"] = c.m_min;
  j["m_max"] = c.m_max;
  j["penalty"] = c.penalty.mode == PenaltyMode::SlopeHeuristic ? "slope" : "fixed";
  j["c_cal"] = c.penalty.c_cal;
  j["slope_fraction"] = c.penalty.window_fraction;
  j["reps"] = c.repetitions;
  j["seed"] = c.seed;
  j["target"] = c.target;
  j["skip_origin"] = c.skip_origin;
  if (c.scenario == Scenario::BlackScholes) {
    j["sigma"] = c.sigma;
    j["S0"] = c.s0;
  }
  if (c.scenario == Scenario::Fsv) {
    j["S0"] = c.s0;
    j["sigma0"] = c.sigma0;
    j["upsilon"] = c.upsilon;
    j["delta"] = c.gap;
    j["price_drift"] = c.price_drift;
    j["stride"] = c.stride;
    j["rho_points"] = c.rho_points;
    j["order"] = c.order;
  }
  j["curve_points"] = c.curve_points;
  return j;
}

RealFunction target_function(const std::string& name) {
  if (name == "J01") return [](double t) { return 10.0 * t * t; };
  if (name == "J02") return [](double t) { return 10.0 * std::sqrt(-std::log(t)); };
  if (name == "J03") return [](double t) { return 20.0 * std::pow(t, -0.05); };
  if (name == "b")
    return [](double t) {
      return std::sin(2.0 * std::numbers::pi * t) + std::cos(2.0 * std::numbers::pi * t);
    };
  if (name == "zero") return [](double) { return 0.0; };
  return parse_expression(name);
}

Aggregate aggregate(std::span<const double> values) {
  Aggregate a;
  a.count = values.size();
  if (values.empty()) {
    a.mean = std::numeric_limits<double>::quiet_NaN();
    a.std = std::numeric_limits<double>::quiet_NaN();
    return a;
  }
  const double n = static_cast<double>(values.size());
  a.mean = pairwise_sum(values) / n;
  if (values.size() < 2) return a;
  std::vector<double> sq(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) sq[i] = (values[i] - a.mean) * (values[i] - a.mean);
  a.std = std::sqrt(pairwise_sum(sq) / (n - 1.0));
  return a;
}

bool ExperimentReport::partial() const { return completed() != reps.size(); }

std::size_t ExperimentReport::completed() const {
  return static_cast<std::size_t>(
      std::count_if(reps.begin(), reps.end(), [](const RepetitionResult& r) { return r.ok; }));
}

ExperimentReport run_experiment(const ExperimentConfig& config, std::size_t threads) {
  (void)validate(config);
  const auto started = std::chrono::steady_clock::now();
  const Plan plan = make_plan(config);

  ExperimentReport report;
  report.config = config;
  report.threads = std::max<std::size_t>(1, threads);
  report.curve_times = plan.curve_times;
  for (double t : plan.curve_times) report.truth_curve.push_back(plan.truth(t));
  report.reps.resize(config.repetitions);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t rep; (rep = next.fetch_add(1)) < config.repetitions;)
      report.reps[rep] = run_one(plan, rep);
  };
  const std::size_t pool = std::min(report.threads, config.repetitions);
  if (pool <= 1) {
    worker();
  } else {
    std::vector<std::jthread> workers;
    for (std::size_t k = 0; k < pool; ++k) workers.emplace_back(worker);
  }
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return report;
}

void ensure_writable(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir))
    throw IoError("cannot create output directory " + dir.string());
  const auto probe = dir / ".mdrift_write_probe";
  {
    std::ofstream out(probe);
    if (!out || !(out << "x")) throw IoError("output directory is not writable: " + dir.string());
  }
  std::filesystem::remove(probe, ec);
}

nlohmann::ordered_json summary_json(const ExperimentReport& report) {
  nlohmann::ordered_json j;
  j["format_version"] = kFormatVersion;
  j["config"] = to_json(report.config);
  j["R"] = report.reps.size();
  j["completed"] = report.completed();
  j["partial"] = report.partial();
  nlohmann::ordered_json agg;
  for (const auto& [name, get] : kColumns) {
    if ((std::string(name) == "sigma_hat" || std::string(name) == "mise_sigma_hat") &&
        report.config.scenario != Scenario::BlackScholes)
      continue;
    agg[name] = aggregate_json(aggregate_of(report.reps, get));
  }
  j["aggregates"] = agg;
  nlohmann::ordered_json failures = nlohmann::ordered_json::array();
  for (const auto& r : report.reps)
    if (!r.ok) failures.push_back({{"rep", r.rep}, {"error", r.error}});
  j["failures"] = failures;
  return j;
}

void emit_outputs(const ExperimentReport& report, const std::filesystem::path& dir) {
  ensure_writable(dir);

  std::ostringstream results;
  results << "rep,m_hat,mise_qv,mise_l2,c_cal,sigma_hat,mise_sigma_hat,status\n";
  for (const auto& r : report.reps) {
    results << r.rep << ',';
    if (r.ok) {
      results << r.m_hat << ',' << cell(r.mise_qv) << ',' << cell(r.mise_l2) << ','
              << cell(r.c_cal) << ',' << cell(r.sigma_hat) << ',' << cell(r.mise_sigma_hat)
              << ",ok\n";
    } else {
      results << ",,,,,,failed\n";
    }
  }
  write_text(dir / "results.csv", results.str());

  write_text(dir / "summary.json", summary_json(report).dump(2) + "\n");

  std::vector<const RepetitionResult*> shown;
  for (const auto& r : report.reps)
    if (r.ok && shown.size() < kCurveColumns) shown.push_back(&r);
  std::ostringstream curves;
  curves << "t,truth";
  for (const auto* r : shown) curves << ",est_" << r->rep + 1;
  curves << '\n';
  for (std::size_t k = 0; k < report.curve_times.size(); ++k) {
    curves << csv::format(report.curve_times[k]) << ',' << cell(report.truth_curve[k]);
    for (const auto* r : shown) curves << ',' << cell(r->curve[k]);
    curves << '\n';
  }
  write_text(dir / "curves.csv", curves.str());

  nlohmann::ordered_json timing;
  timing["wall_clock_seconds"] = report.wall_seconds;
  timing["threads"] = report.threads;
  write_text(dir / "timing.json", timing.dump(2) + "\n");
}

LoadedReport load_report(const std::filesystem::path& dir) {
  LoadedReport out;
  {
    std::ifstream in(dir / "summary.json");
    if (!in) throw IoError("cannot read " + (dir / "summary.json").string());
    try {
      out.summary = nlohmann::ordered_json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw IoError(std::string("malformed summary.json: ") + e.what());
    }
  }
  std::ifstream in(dir / "results.csv");
  if (!in) throw IoError("cannot read " + (dir / "results.csv").string());
  std::string line;
  std::getline(in, line);
  const auto number = [](const std::string& s) {
    return s.empty() ? std::numeric_limits<double>::quiet_NaN() : std::stod(s);
  };
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = csv::split(line);
    if (f.size() != 8) throw IoError("malformed results.csv row: " + line);
    RepetitionResult r;
    try {
      r.rep = std::stoull(f[0]);
      r.ok = f[7] == "ok";
      if (r.ok) {
        r.m_hat = std::stoull(f[1]);
        r.mise_qv = number(f[2]);
        r.mise_l2 = number(f[3]);
        r.c_cal = number(f[4]);
        r.sigma_hat = number(f[5]);
        r.mise_sigma_hat = number(f[6]);
      }
    } catch (const std::exception&) {
      throw IoError("malformed results.csv row: " + line);
    }
    out.rows.push_back(std::move(r));
  }
  if (out.summary.value("R", std::size_t{0}) != out.rows.size())
    throw IoError("summary.json R does not match results.csv");

  const auto& agg = out.summary.at("aggregates");
  for (const auto& [name, get] : kColumns) {
    if (!agg.contains(name)) continue;
    const Aggregate a = aggregate_of(out.rows, get);
    const auto& s = agg.at(name);
    if (s.at("count").get<std::size_t>() != a.count)
      throw IoError(std::string("aggregate count mismatch for ") + name);
    for (const auto& [field, value] : {std::pair{"mean", a.mean}, std::pair{"std", a.std}}) {
      const auto& stored = s.at(field);
      if (stored.is_null()) {
        if (std::isfinite(value)) throw IoError(std::string("aggregate mismatch for ") + name);
        continue;
      }
      const double x = stored.get<double>();
      if (!(std::abs(x - value) <= 1e-12 * std::max(1.0, std::abs(value))))
        throw IoError(std::string("aggregate ") + field + " mismatch for " + name);
    }
  }
  return out;
}

}  // namespace mdrift

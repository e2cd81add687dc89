// mdrift: simulate, fit and benchmark drift estimators for martingale-driven models.

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <string>
#include <vector>

#include "mdrift/apps.hpp"
#include "mdrift/basis.hpp"
#include "mdrift/core.hpp"
#include "mdrift/csv.hpp"
#include "mdrift/estimator.hpp"
#include "mdrift/experiment.hpp"
#include "mdrift/expression.hpp"
#include "mdrift/fracops.hpp"
#include "mdrift/rng.hpp"
#include "mdrift/simulate.hpp"

namespace fs = std::filesystem;
using namespace mdrift;

namespace {

struct Global {
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  std::string out = ".";
};

struct SelectionArgs {
  std::size_t m_min = 2;
  std::size_t m_max = 12;
  std::string penalty = "slope";
  double c_cal = 2.0;
  double fraction = 0.5;

  void add(CLI::App* app) {
    app->add_option("--m-min", m_min, "smallest candidate dimension")->capture_default_str();
    app->add_option("--m-max", m_max, "largest candidate dimension")->capture_default_str();
    app->add_option("--penalty", penalty, "slope | fixed")
        ->check(CLI::IsMember({"slope", "fixed"}))
        ->capture_default_str();
    app->add_option("--c-cal", c_cal, "penalty constant for --penalty fixed")
        ->capture_default_str();
    app->add_option("--slope-fraction", fraction, "upper share of dimensions for the slope fit")
        ->capture_default_str();
  }
  PenaltyConfig config() const {
    return {c_cal, penalty == "slope" ? PenaltyMode::SlopeHeuristic : PenaltyMode::Fixed,
            fraction};
  }
  std::vector<std::size_t> dims() const {
    if (m_min < 1 || m_max < m_min) throw ConfigError("need 1 <= m-min <= m-max");
    std::vector<std::size_t> d;
    for (std::size_t m = m_min; m <= m_max; ++m) d.push_back(m);
    return d;
  }
};

void write_json(const fs::path& file, const nlohmann::ordered_json& j) {
  std::ofstream out(file);
  if (!out) throw IoError("cannot write " + file.string());
  out << j.dump(2) << '\n';
}

std::vector<double> curve_nodes(double a, double b, std::size_t points) {
  std::vector<double> t(points);
  for (std::size_t k = 0; k < points; ++k)
    t[k] = a + (b - a) * static_cast<double>(k) / static_cast<double>(points - 1);
  return t;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Drift estimation for martingale-driven models"};
  app.require_subcommand(1);
  Global g;
  app.add_option("--seed", g.seed, "master seed")->capture_default_str();
  app.add_option("--threads", g.threads, "worker threads for experiments")->capture_default_str();
  app.add_option("--out", g.out, "output directory")->capture_default_str();

  // simulate
  auto* sim = app.add_subcommand("simulate", "simulate data and write it as CSV");
  std::string sim_model = "molchan";
  double sim_h = 0.6, sim_t = 1.0, sim_sigma = 0.2, sim_s0 = 10.0, sim_ups = 0.3, sim_sigma0 = 0.2,
         sim_delta = 5.0;
  std::size_t sim_n_copies = 100, sim_steps = 5000;
  std::string sim_drift, sim_price_drift = "0";
  bool sim_skip = false;
  sim->add_option("--model", sim_model, "molchan | black-scholes | fsv")
      ->check(CLI::IsMember({"molchan", "black-scholes", "fsv"}))
      ->capture_default_str();
  sim->add_option("--H", sim_h, "Hurst index")->capture_default_str();
  sim->add_option("--T", sim_t, "horizon of one copy")->capture_default_str();
  sim->add_option("--N", sim_n_copies, "number of copies")->capture_default_str();
  sim->add_option("--n", sim_steps,
                  "steps: per copy (molchan, fsv) or over [0, N T] (black-scholes)")
      ->capture_default_str();
  sim->add_option("--drift", sim_drift,
                  "J0, b0 or rho0: J01 J02 J03 b zero or an expression "
                  "(default J01 for molchan, b otherwise)");
  sim->add_option("--sigma", sim_sigma, "black-scholes volatility")->capture_default_str();
  sim->add_option("--S0", sim_s0, "initial price")->capture_default_str();
  sim->add_option("--upsilon", sim_ups, "fsv vol-of-vol")->capture_default_str();
  sim->add_option("--sigma0", sim_sigma0, "fsv initial volatility")->capture_default_str();
  sim->add_option("--delta", sim_delta, "fsv gap between copies")->capture_default_str();
  sim->add_option("--price-drift", sim_price_drift, "fsv price drift b")->capture_default_str();
  sim->add_flag("--skip-origin", sim_skip, "drop t = 0 from estimation (molchan)");

  // fit
  auto* fitc = app.add_subcommand("fit", "select and fit J_hat from an ensemble CSV");
  std::string fit_input;
  double fit_h = 0.5;
  bool fit_skip = false;
  std::size_t fit_points = 201;
  SelectionArgs fit_sel;
  fitc->add_option("--input", fit_input, "ensemble CSV (copy,t,value)")->required();
  fitc->add_option("--H", fit_h, "Hurst index of <M>_t = t^{2-2H}")->capture_default_str();
  fitc->add_flag("--skip-origin", fit_skip, "drop t = 0 from estimation");
  fitc->add_option("--points", fit_points, "rows of the estimate table")->capture_default_str();
  fit_sel.add(fitc);

  // experiment
  auto* exp = app.add_subcommand("experiment", "run a Monte-Carlo experiment");
  std::string exp_config;
  std::vector<std::string> exp_set;
  exp->add_option("--config", exp_config, "key = value config file");
  exp->add_option("--set", exp_set, "override, key=value (repeatable)");

  // bs
  auto* bs = app.add_subcommand("bs", "estimate b0 from one price path");
  std::string bs_input;
  double bs_t = 1.0;
  std::size_t bs_n = 100, bs_points = 201;
  std::optional<double> bs_sigma;
  SelectionArgs bs_sel;
  bs->add_option("--input", bs_input, "price CSV (t,value) on a uniform grid from 0")->required();
  bs->add_option("--N", bs_n, "number of copies")->capture_default_str();
  bs->add_option("--T", bs_t, "period of the drift")->capture_default_str();
  bs->add_option("--sigma", bs_sigma, "known volatility (estimated when omitted)");
  bs->add_option("--points", bs_points, "rows of the estimate table")->capture_default_str();
  bs_sel.add(bs);

  // fsv
  auto* fsvc = app.add_subcommand("fsv", "estimate rho0 from one volatility path");
  std::string fsv_input;
  double fsv_t = 1.0, fsv_delta = 5.0, fsv_h = 0.75, fsv_ups = 0.3;
  std::size_t fsv_n = 50, fsv_stride = 1, fsv_points = 50, fsv_order = 64;
  SelectionArgs fsv_sel;
  fsvc->add_option("--input", fsv_input, "volatility CSV (t,value) on a uniform grid from 0")
      ->required();
  fsvc->add_option("--N", fsv_n, "number of copies")->capture_default_str();
  fsvc->add_option("--T", fsv_t, "period of the drift")->capture_default_str();
  fsvc->add_option("--delta", fsv_delta, "gap between copies")->capture_default_str();
  fsvc->add_option("--H", fsv_h, "Hurst index")->capture_default_str();
  fsvc->add_option("--upsilon", fsv_ups, "vol-of-vol")->capture_default_str();
  fsvc->add_option("--stride", fsv_stride, "keep every stride-th node of Z")->capture_default_str();
  fsvc->add_option("--points", fsv_points, "output nodes on [T/50, T]")->capture_default_str();
  fsvc->add_option("--order", fsv_order, "Gauss-Jacobi order")->capture_default_str();
  fsv_sel.add(fsvc);

  // sigma
  auto* sig = app.add_subcommand("sigma", "realized volatility of a price path");
  std::string sig_input;
  sig->add_option("--input", sig_input, "price CSV (t,value)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    const fs::path out(g.out);
    if (*sim) {
      fs::create_directories(out);
      RngStream rng(g.seed, 0);
      const RealFunction drift =
          target_function(!sim_drift.empty() ? sim_drift : sim_model == "molchan" ? "J01" : "b");
      if (sim_model == "molchan") {
        const QuadVarModel qv = QuadVarModel::molchan(sim_h, sim_t);
        const TimeGrid grid(sim_t, sim_steps, sim_skip);
        const auto incr = drift_increments(drift, qv, grid);
        const Ensemble ens = simulate_z_ensemble(incr, qv, grid, sim_n_copies, g.seed, 0);
        csv::write_ensemble(out / "ensemble.csv", ens);
      } else if (sim_model == "black-scholes") {
        const TimeGrid grid(static_cast<double>(sim_n_copies) * sim_t, sim_steps);
        const SamplePath s = simulate_black_scholes({sim_s0, sim_sigma, drift}, grid, rng);
        csv::write_path(out / "price.csv", s);
      } else {
        const double h = sim_t / static_cast<double>(sim_steps);
        const double span = static_cast<double>(sim_n_copies) * (sim_t + sim_delta);
        const TimeGrid grid(span, static_cast<std::size_t>(std::llround(span / h)));
        const FracStochVolModel model{sim_s0, sim_sigma0, sim_ups, sim_h,
                                      parse_expression(sim_price_drift), drift, sim_delta};
        const FsvPaths p = simulate_fsv(model, grid, rng);
        csv::write_path(out / "price.csv", p.price);
        csv::write_path(out / "vol.csv", p.vol);
      }
    } else if (*fitc) {
      const Ensemble ens = csv::read_ensemble(fit_input, fit_skip);
      const double horizon = ens.grid().horizon();
      const QuadVarModel qv = fit_h == 0.5 ? QuadVarModel::lebesgue(horizon)
                                           : QuadVarModel::molchan(fit_h, horizon);
      const auto dims = fit_sel.dims();
      const BasisFamily family = BasisFamily::trigonometric(horizon, dims.back());
      const FitResult f = select_model(ens, family, dims, qv, fit_sel.config());
      fs::create_directories(out);
      write_json(out / "fit.json", to_json(f));
      const auto t = curve_nodes(ens.grid().start(), horizon, fit_points);
      std::vector<double> v;
      for (double x : t) v.push_back(f.value(family, x));
      csv::write_series(out / "estimate.csv", t, v);
    } else if (*exp) {
      ExperimentConfig cfg;
      if (!exp_config.empty()) cfg = load_config(exp_config);
      for (const auto& kv : exp_set) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw ConfigError("--set expects key=value: " + kv);
        set_config_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
      }
      if (app.count("--seed")) cfg.seed = g.seed;
      for (const auto& w : validate(cfg)) std::cerr << "warning: " << w << '\n';
      ensure_writable(out);
      const ExperimentReport report = run_experiment(cfg, g.threads);
      emit_outputs(report, out);
      const auto s = summary_json(report);
      std::cout << s["aggregates"].dump(2) << '\n';
      if (report.partial()) {
        std::cerr << "warning: " << report.reps.size() - report.completed()
                  << " repetition(s) failed\n";
        return 3;
      }
    } else if (*bs) {
      const SamplePath prices = csv::read_path(bs_input);
      const Ensemble copies = segment(prices, bs_n, bs_t);
      const double sigma = bs_sigma ? *bs_sigma : estimate_sigma(prices);
      const auto dims = bs_sel.dims();
      const BasisFamily family = BasisFamily::trigonometric(bs_t, dims.back());
      const DriftEstimate est =
          estimate_drift_bs(bs_build_z(copies, sigma), family, dims, sigma, bs_sel.config());
      fs::create_directories(out);
      auto j = to_json(est.fit);
      j["sigma"] = sigma;
      j["sigma_estimated"] = !bs_sigma.has_value();
      write_json(out / "fit.json", j);
      const auto t = curve_nodes(0.0, bs_t, bs_points);
      std::vector<double> v;
      for (double x : t) v.push_back(est(x));
      csv::write_series(out / "b_hat.csv", t, v);
    } else if (*fsvc) {
      const SamplePath vol = csv::read_path(fsv_input);
      const Ensemble copies = segment(vol, fsv_n, fsv_t, fsv_delta);
      const Ensemble z = fsv_build_z(copies, fsv_ups, fsv_h, fsv_stride);
      const auto dims = fsv_sel.dims();
      const BasisFamily family = BasisFamily::trigonometric(fsv_t, dims.back());
      const auto times = output_times(fsv_t, fsv_points);
      const RhoEstimate est =
          estimate_rho(z, family, dims, fsv_ups, fsv_h, fsv_sel.config(), times, fsv_order);
      fs::create_directories(out);
      write_json(out / "fit.json", to_json(est.fit));
      csv::write_series(out / "rho_hat.csv", est.rho.times(), est.rho.values());
    } else if (*sig) {
      const double s = estimate_sigma(csv::read_path(sig_input));
      std::cout << csv::format(s) << '\n';
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const DimensionError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}

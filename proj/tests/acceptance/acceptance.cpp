// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <unistd.h>

#include "mdrift/apps.hpp"
#include "mdrift/basis.hpp"
#include "mdrift/estimator.hpp"
#include "mdrift/experiment.hpp"
#include "mdrift/fracops.hpp"
#include "mdrift/rng.hpp"
#include "mdrift/simulate.hpp"

using namespace mdrift;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::vector<std::string> details;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

std::size_t worker_count() { return std::max(1u, std::thread::hardware_concurrency()); }

bool within(double value, double target, double tol) { return std::abs(value - target) <= tol; }

// 1. E ||J_hat_m||^2_<M> = m / N under pure noise.
Outcome pure_noise_identity() {
  constexpr std::size_t copies = 1000, steps = 100000, reps = 200;
  const std::vector<std::size_t> dims{1, 5, 11};
  const auto family = BasisFamily::trigonometric(1.0, 11);
  Outcome out{true, {}};
  out.details.push_back(fmt("n capped at %zu (N^2 = %zu), pooled copy-averaged increments", steps,
                            copies * copies));
  for (double h : {0.5, 0.6, 0.9}) {
    const auto qv = QuadVarModel::molchan(h, 1.0);
    const TimeGrid grid(1.0, steps, true);
    const std::vector<double> zero(steps, 0.0);
    const auto gram = gram_matrix(family, 11, qv, grid.start());
    const DesignTable design(family, 11, grid);
    std::vector<double> sums(dims.size(), 0.0);
    for (std::size_t r = 0; r < reps; ++r) {
      RngStream rng(101, r);
      const auto pooled = simulate_pooled_increments(zero, qv, grid, copies, rng);
      const Eigen::VectorXd z = design.project(pooled);
      for (std::size_t k = 0; k < dims.size(); ++k) {
        const auto m = static_cast<Eigen::Index>(dims[k]);
        const Eigen::VectorXd zm = z.head(m);
        sums[k] += zm.dot(gram.leading(dims[k]).solve(zm));
      }
    }
    for (std::size_t k = 0; k < dims.size(); ++k) {
      const double expected = static_cast<double>(dims[k]) / copies;
      const double ratio = sums[k] / reps / expected;
      const bool ok = std::abs(ratio - 1.0) <= 0.15;
      out.pass = out.pass && ok;
      out.details.push_back(fmt("H=%.1f m=%2zu mean/(m/N)=%.4f %s", h, dims[k], ratio, ok ? "ok" : "off"));
    }
  }
  // Cross-check of the pooled law against explicit copies (not gated).
  {
    constexpr std::size_t n_copies = 100, n_steps = 2000, m = 5;
    const auto qv = QuadVarModel::molchan(0.6, 1.0);
    const TimeGrid grid(1.0, n_steps, true);
    const std::vector<double> zero(n_steps, 0.0);
    const auto gram = gram_matrix(family, m, qv, grid.start());
    double sum = 0.0;
    for (std::size_t r = 0; r < reps; ++r) {
      const auto ens = simulate_z_ensemble(zero, qv, grid, n_copies, 102, r * n_copies);
      const Eigen::VectorXd z = project_data(ens, family, m);
      sum += z.dot(gram.solve(z));
    }
    out.details.push_back(fmt("explicit copies H=0.6 N=%zu m=%zu: mean/(m/N)=%.4f (info)", n_copies, m,
                              sum / reps / (static_cast<double>(m) / n_copies)));
  }
  return out;
}

// 2. c_H B(3/2-H, 3/2-H) c_bar_H B(2-2H, H-1/2) = 1.
Outcome gamma_identity() {
  Outcome out{true, {}};
  double worst = 0.0;
  for (int k = 11; k <= 19; ++k) {
    const double h = 0.05 * k;
    const auto hc = HurstConstants::of(h);
    const double v = hc.c * std::beta(1.5 - h, 1.5 - h) * hc.c_bar * std::beta(2.0 - 2.0 * h, h - 0.5);
    worst = std::max(worst, std::abs(v - 1.0));
  }
  out.pass = worst <= 1e-10;
  out.details.push_back(fmt("max |product - 1| over H=0.55..0.95: %.3e", worst));
  return out;
}

// 3. sup |Jbar(J(Q)) - Q| on [T/50, T].
Outcome round_trip() {
  Outcome out{true, {}};
  const auto times = output_times(1.0, 50);
  for (double h : {0.6, 0.75, 0.9}) {
    for (int p = 0; p <= 2; ++p) {
      const RealFunction q = [p](double s) { return std::pow(s, p); };
      const RealFunction jq = [&](double s) {
        const double t[1] = {s};
        return forward_J(q, t, 1.0, h).values()[0];
      };
      double worst = 0.0;
      for (double t : times) worst = std::max(worst, std::abs(inverse_Jbar_at(jq, t, h, 64) - q(t)));
      const bool ok = worst <= 1e-3;
      out.pass = out.pass && ok;
      out.details.push_back(fmt("H=%.2f Q=t^%d sup error %.3e", h, p, worst));
    }
  }
  return out;
}

ExperimentConfig molchan_cell(const char* target, double h) {
  ExperimentConfig c = scenario_defaults(Scenario::MolchanJ);
  c.target = target;
  c.hurst = h;
  c.copies = 100;
  c.steps = 5000;
  c.m_min = 2;
  c.m_max = 12;
  c.repetitions = 100;
  c.seed = 2024;
  return c;
}

struct Summary {
  Aggregate qv, l2, sigma_hat, sigma_mise;
};

Summary summarize(const ExperimentReport& report) {
  std::vector<double> qv, l2, sh, sm;
  for (const auto& r : report.reps) {
    if (!r.ok) continue;
    qv.push_back(r.mise_qv);
    l2.push_back(r.mise_l2);
    sh.push_back(r.sigma_hat);
    sm.push_back(r.mise_sigma_hat);
  }
  return {aggregate(qv), aggregate(l2), aggregate(sh), aggregate(sm)};
}

double tolerance(double reference, const Aggregate& a) {
  return std::max(0.5 * reference, 3.0 * a.std / std::sqrt(static_cast<double>(a.count)));
}

ExperimentReport first_cell_report;

// 4. Molchan-scenario reference MISE values.
Outcome molchan_reference() {
  struct Cell {
    const char* target;
    double h;
    double reference;
  };
  const Cell cells[] = {{"J01", 0.6, 0.047}, {"J02", 0.6, 0.103}, {"J03", 0.6, 0.076},
                        {"J01", 0.9, 0.135}, {"J02", 0.9, 0.300}, {"J03", 0.9, 0.287}};
  Outcome out{false, {}};
  bool all_qv = true, all_l2 = true;
  for (const auto& cell : cells) {
    auto report = run_experiment(molchan_cell(cell.target, cell.h), worker_count());
    const auto s = summarize(report);
    const bool ok_qv = within(s.qv.mean, cell.reference, tolerance(cell.reference, s.qv));
    const bool ok_l2 = within(s.l2.mean, cell.reference, tolerance(cell.reference, s.l2));
    all_qv = all_qv && ok_qv && s.qv.count == 100;
    all_l2 = all_l2 && ok_l2 && s.l2.count == 100;
    out.details.push_back(fmt("%s H=%.1f target %.3f | <M>-norm %.4f (std %.4f) %s | L2 %.4f (std %.4f) %s",
                              cell.target, cell.h, cell.reference, s.qv.mean, s.qv.std, ok_qv ? "ok" : "off",
                              s.l2.mean, s.l2.std, ok_l2 ? "ok" : "off"));
    if (&cell == &cells[0]) first_cell_report = std::move(report);
  }
  out.pass = all_qv || all_l2;
  out.details.push_back(fmt("all cells within tolerance: <M>-norm %s, L2 %s", all_qv ? "yes" : "no",
                            all_l2 ? "yes" : "no"));
  return out;
}

// 5. Black-Scholes reference MISE and sigma_hat values.
Outcome black_scholes_reference() {
  struct Cell {
    double sigma, mise_known, sigma_hat, mise_est;
  };
  Outcome out{true, {}};
  for (const Cell cell : {Cell{0.2, 0.002, 0.223, 0.001}, Cell{1.0, 0.042, 1.005, 0.042}}) {
    ExperimentConfig c = scenario_defaults(Scenario::BlackScholes);
    c.sigma = cell.sigma;
    c.s0 = 10.0;
    c.copies = 100;
    c.steps = 10000;
    c.repetitions = 100;
    c.seed = 2025;
    const auto s = summarize(run_experiment(c, worker_count()));
    const bool ok_known = within(s.qv.mean, cell.mise_known, tolerance(cell.mise_known, s.qv));
    const bool ok_sigma = within(s.sigma_hat.mean, cell.sigma_hat, 0.02);
    const bool ok_est = within(s.sigma_mise.mean, cell.mise_est, tolerance(cell.mise_est, s.sigma_mise));
    out.pass = out.pass && ok_known && ok_sigma && ok_est && s.qv.count == 100;
    out.details.push_back(fmt("sigma=%.1f MISE %.4f (std %.4f) vs %.3f %s", cell.sigma, s.qv.mean, s.qv.std,
                              cell.mise_known, ok_known ? "ok" : "off"));
    out.details.push_back(fmt("sigma=%.1f mean sigma_hat %.4f vs %.3f %s", cell.sigma, s.sigma_hat.mean,
                              cell.sigma_hat, ok_sigma ? "ok" : "off"));
    out.details.push_back(fmt("sigma=%.1f MISE with sigma_hat %.4f (std %.4f) vs %.3f %s", cell.sigma,
                              s.sigma_mise.mean, s.sigma_mise.std, cell.mise_est, ok_est ? "ok" : "off"));
  }
  return out;
}

// 6. R(m) closed form against grid maximization, and the cubic growth.
Outcome cubic_law() {
  Outcome out{true, {}};
  const auto family = BasisFamily::trigonometric(1.0, 33);
  for (std::size_t m : {3, 5, 7, 9}) {
    double direct = 0.0;
    for (std::size_t j = 1; j <= m / 2; ++j) direct += static_cast<double>(j * j);
    direct *= 8.0 * M_PI * M_PI;
    const double closed = basis_sup_deriv_sq(family, m);
    const double grid = basis_sup_deriv_sq_on_grid(family, m, 4001);
    const double err = std::max(std::abs(closed - grid), std::abs(closed - direct)) / closed;
    out.pass = out.pass && err <= 1e-9;
    out.details.push_back(fmt("m=%zu R=%.6f grid=%.6f rel diff %.2e", m, closed, grid, err));
  }
  const double ratio = basis_sup_deriv_sq(family, 33) / basis_sup_deriv_sq(family, 17);
  const bool ok = std::abs(ratio / 8.0 - 1.0) <= 0.15;
  out.pass = out.pass && ok;
  out.details.push_back(fmt("R(33)/R(17) = %.4f", ratio));
  return out;
}

// 7. Fixed-dimension risk against bias + 2 m / N + 3 standard errors.
Outcome risk_bound() {
  Outcome out{true, {}};
  const auto qv = QuadVarModel::molchan(0.6, 1.0);
  const auto family = BasisFamily::trigonometric(1.0, 12);
  const auto truth = target_function("J01");
  const TimeGrid grid(1.0, 5000, true);
  for (std::size_t m = 2; m <= 12; ++m) {
    auto c = molchan_cell("J01", 0.6);
    c.m_min = c.m_max = m;
    c.penalty.mode = PenaltyMode::Fixed;
    const auto s = summarize(run_experiment(c, worker_count()));
    const double bias = projection_bias(truth, family, m, qv, grid.start());
    const double bound = bias + 2.0 * m / 100.0 + 3.0 * s.qv.std / std::sqrt(double(s.qv.count));
    const bool ok = s.qv.mean <= bound && s.qv.count == 100;
    out.pass = out.pass && ok;
    out.details.push_back(fmt("m=%2zu MISE %.4f bias %.4f bound %.4f %s", m, s.qv.mean, bias, bound,
                              ok ? "ok" : "off"));
  }
  return out;
}

// 8. Zero-noise recovery of a drift in S_m.
Outcome noiseless_recovery() {
  Outcome out{true, {}};
  const std::vector<double> theta{1.0, -0.5, 0.25, 0.0, 0.8};
  const auto family = BasisFamily::trigonometric(1.0, theta.size());
  const RealFunction drift = [&](double t) { return family.expand(theta, t); };
  constexpr std::size_t steps = 5000;
  for (double h : {0.5, 0.6, 0.9}) {
    const auto qv = QuadVarModel::molchan(h, 1.0);
    const TimeGrid grid(1.0, steps, true);
    const auto incr = drift_increments(drift, qv, grid);
    std::vector<double> path(steps + 1, 0.0);
    for (std::size_t l = 0; l < steps; ++l) path[l + 1] = path[l] + incr[l];
    // identical copies: the estimator needs N >= m, and averaging leaves the path unchanged
    const auto result = fit(Ensemble(grid, std::vector(theta.size(), path)), family, theta.size(), qv);
    double worst = 0.0;
    for (std::size_t j = 0; j < theta.size(); ++j)
      worst = std::max(worst, std::abs(result.coefficients[static_cast<Eigen::Index>(j)] - theta[j]));
    const bool ok = worst <= 10.0 / steps;
    out.pass = out.pass && ok;
    out.details.push_back(fmt("H=%.1f max coefficient error %.3e (limit %.1e)", h, worst, 10.0 / steps));
  }
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// 9. Same seed, same bytes.
Outcome determinism() {
  Outcome out{false, {}};
  const auto root = fs::temp_directory_path() / ("mdrift_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(root);
  auto first = std::move(first_cell_report);
  if (first.reps.empty()) first = run_experiment(molchan_cell("J01", 0.6), worker_count());
  emit_outputs(first, root / "a");
  emit_outputs(run_experiment(molchan_cell("J01", 0.6), 1), root / "b");
  const auto a = slurp(root / "a" / "results.csv");
  const auto b = slurp(root / "b" / "results.csv");
  out.pass = !a.empty() && a == b;
  out.details.push_back(fmt("results.csv %zu bytes, identical: %s", a.size(), a == b ? "yes" : "no"));
  fs::remove_all(root);
  return out;
}

// 10. Block covariance against its large-gap equivalent.
Outcome covariance_decay() {
  Outcome out{true, {}};
  for (auto [s, t] : {std::pair{0.5, 1.0}, std::pair{0.99, 1.0}, std::pair{0.25, 0.75}}) {
    const auto c = block_covariance_decay(0.75, 1.0, 1000.0, s, t, 0, 1);
    const double ratio = c.exact / c.asymptote;
    const bool ok = std::abs(ratio - 1.0) <= 0.05;
    out.pass = out.pass && ok;
    out.details.push_back(fmt("s=%.2f t=%.2f exact/asymptote %.5f", s, t, ratio));
  }
  return out;
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"pure-noise variance identity", pure_noise_identity},
      {"gamma identity", gamma_identity},
      {"round trip Jbar(J(Q)) = Q", round_trip},
      {"Molchan reference MISE", molchan_reference},
      {"Black-Scholes reference MISE", black_scholes_reference},
      {"R(m) cubic law", cubic_law},
      {"oracle risk bound", risk_bound},
      {"noiseless recovery", noiseless_recovery},
      {"determinism", determinism},
      {"covariance decay", covariance_decay},
  };
  int failures = 0;
  int index = 0;
  for (const auto& [name, run] : criteria) {
    ++index;
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = run();
    } catch (const std::exception& e) {
      outcome = {false, {std::string("exception: ") + e.what()}};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    for (const auto& d : outcome.details) std::printf("    %s\n", d.c_str());
    std::printf("criterion %2d %s: %s (%.1f s)\n", index, name, outcome.pass ? "PASS" : "FAIL", secs);
    std::fflush(stdout);
    failures += outcome.pass ? 0 : 1;
  }
  std::printf("%d of %d criteria passed\n", index - failures, index);
  return failures == 0 ? 0 : 1;
}

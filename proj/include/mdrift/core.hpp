#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "mdrift/errors.hpp"

namespace mdrift {

using RealFunction = std::function<double(double)>;

/// Uniform dissection t_l = l T / n of [0, T].
///
/// When `skip_origin` is set the observations used for estimation start at
/// t_1 = T/n, so that densities and drifts singular at 0 are never evaluated
/// there. The grid itself always carries the node t_0 = 0.
class TimeGrid {
 public:
  TimeGrid(double horizon, std::size_t steps, bool skip_origin = false);

  double horizon() const { return horizon_; }
  std::size_t steps() const { return steps_; }
  double step() const { return horizon_ / static_cast<double>(steps_); }
  bool skips_origin() const { return skip_origin_; }

  /// Index of the first node used for estimation (0 or 1).
  std::size_t first_index() const { return skip_origin_ ? 1 : 0; }
  double start() const { return (*this)[first_index()]; }

  double operator[](std::size_t l) const {
    return static_cast<double>(l) * horizon_ / static_cast<double>(steps_);
  }
  std::vector<double> times() const;

  friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

 private:
  double horizon_;
  std::size_t steps_;
  bool skip_origin_;
};

/// Quadratic variation <M>_t = t (Brownian case).
struct Lebesgue {};

/// Molchan martingale: <M>_t = t^{2-2H}, density (2-2H) t^{1-2H}.
struct MolchanPower {
  double hurst;
};

/// Density given at nodes, piecewise linear in between; <M> integrates it exactly.
struct Tabulated {
  std::vector<double> times;
  std::vector<double> density;
  std::vector<double> cumulative;
};

/// Deterministic quadratic variation of the driving martingale, described by its density.
class QuadVarModel {
 public:
  using Variant = std::variant<Lebesgue, MolchanPower, Tabulated>;

  static QuadVarModel lebesgue(double horizon);
  static QuadVarModel molchan(double hurst, double horizon);
  /// `times` must start at 0 and end at the horizon; `density` must be positive.
  static QuadVarModel tabulated(std::vector<double> times, std::vector<double> density);

  double horizon() const { return horizon_; }
  const Variant& variant() const { return model_; }

  /// Hurst index for MolchanPower models.
  std::optional<double> hurst() const;

  /// True when the density is identically one (Lebesgue, or Molchan with H = 1/2).
  bool is_unit_density() const;

  /// mu(t) for t in (0, T].
  double density(double t) const;

 private:
  QuadVarModel(Variant model, double horizon) : model_(std::move(model)), horizon_(horizon) {}

  Variant model_;
  double horizon_;
};

/// <M>_t, exact for the Lebesgue and MolchanPower variants.
double quad_var(const QuadVarModel& model, double t);

struct QuadratureOptions {
  double rel_tol = 1e-10;
  unsigned max_depth = 20;
};

/// \int_a^b f(s) d<M>_s = \int_a^b f(s) mu(s) ds.
///
/// MolchanPower integrals are taken in the variable u = s^{2-2H}, where the
/// measure becomes du and the t^{1-2H} singularity disappears. Integrable
/// singularities of f at s = 0 are allowed.
double integrate_dqv(const RealFunction& f, const QuadVarModel& model, double a, double b,
                     const QuadratureOptions& options = {});

/// Plain \int_a^b f(s) ds with the same adaptive rule.
double integrate_dt(const RealFunction& f, double a, double b,
                    const QuadratureOptions& options = {});

/// A discretely observed path: values[l] is the process at grid[l].
struct SamplePath {
  TimeGrid grid;
  std::vector<double> values;

  SamplePath(TimeGrid g, std::vector<double> v);
};

/// N paths on one shared grid.
class Ensemble {
 public:
  Ensemble(TimeGrid grid, std::vector<std::vector<double>> paths);

  const TimeGrid& grid() const { return grid_; }
  std::size_t size() const { return paths_.size(); }
  std::span<const double> path(std::size_t i) const { return paths_[i]; }
  const std::vector<std::vector<double>>& paths() const { return paths_; }

 private:
  TimeGrid grid_;
  std::vector<std::vector<double>> paths_;
};

/// Mean over copies of the increments X^i_{t_{l+1}} - X^i_{t_l}, l = 0..n-1.
///
/// Summation over copies is a pairwise tree in ascending copy order, so the
/// result does not depend on how the ensemble was produced.
std::vector<double> pooled_increments(const Ensemble& ensemble);

/// Deterministic pairwise sum.
double pairwise_sum(std::span<const double> values);

}  // namespace mdrift

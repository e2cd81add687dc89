#include "mdrift/core.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

namespace mdrift {

namespace {

constexpr double kTimeSlack = 1e-12;

void check_hurst(double hurst) {
  if (!(hurst >= 0.5 && hurst < 1.0)) {
    throw DomainError("Hurst index must lie in [1/2, 1), got " + std::to_string(hurst));
  }
}

void check_time(const QuadVarModel& model, double t) {
  if (!(t >= -kTimeSlack * model.horizon() && t <= model.horizon() * (1.0 + kTimeSlack))) {
    std::ostringstream msg;
    msg << "time " << t << " outside [0, " << model.horizon() << "]";
    throw DomainError(msg.str());
  }
}

double finite_or_throw(double result, double a, double b) {
  if (!std::isfinite(result)) {
    throw NumericError("quadrature produced a non-finite value on [" + std::to_string(a) + ", " +
                       std::to_string(b) + "]");
  }
  return result;
}

struct Piece {
  double value;
  double error;
};

Piece kronrod_pass(const RealFunction& g, double a, double b) {
  double error = 0.0;
  const double r =
      boost::math::quadrature::gauss_kronrod<double, 61>::integrate(g, a, b, 0, 0.0, &error);
  return {finite_or_throw(r, a, b), error};
}

// Bisection on the 61-point Gauss-Kronrod rule. A piece is accepted once its error
// estimate is below its share of the tolerance, or once halving stops reducing the
// estimate (roundoff floor, e.g. for integrals that cancel to ~0).
double kronrod_split(const RealFunction& g, double a, double b, Piece whole, unsigned depth,
                     double tol) {
  if (depth == 0 || whole.error <= tol) return whole.value;
  const double mid = 0.5 * (a + b);
  const Piece left = kronrod_pass(g, a, mid);
  const Piece right = kronrod_pass(g, mid, b);
  if (left.error + right.error >= whole.error) return left.value + right.value;
  return kronrod_split(g, a, mid, left, depth - 1, 0.5 * tol) +
         kronrod_split(g, mid, b, right, depth - 1, 0.5 * tol);
}

double kronrod(const RealFunction& g, double a, double b, const QuadratureOptions& options) {
  try {
    const Piece whole = kronrod_pass(g, a, b);
    return finite_or_throw(
        kronrod_split(g, a, b, whole, options.max_depth, options.rel_tol * std::abs(whole.value)),
        a, b);
  } catch (const NumericError&) {
    throw;
  } catch (const std::exception& e) {
    throw NumericError(std::string("quadrature failed: ") + e.what());
  }
}

// The first 1/64 of an interval starting at 0 goes to tanh-sinh, which absorbs
// integrable endpoint singularities; the rest to adaptive Gauss-Kronrod.
double adaptive(const RealFunction& g, double a, double b, const QuadratureOptions& options) {
  if (a == b) return 0.0;
  if (a != 0.0) return kronrod(g, a, b, options);
  const double c = b / 64.0;
  double head = 0.0, error = 0.0, l1 = 0.0;
  try {
    thread_local boost::math::quadrature::tanh_sinh<double> rule(15, 1e-40);
    head = rule.integrate(g, 0.0, c, options.rel_tol, &error, &l1);
  } catch (const std::exception& e) {
    throw NumericError(std::string("quadrature failed near 0: ") + e.what());
  }
  finite_or_throw(head, 0.0, c);
  if (error > 1e-6 * std::max(1.0, std::abs(head))) {
    throw NumericError("quadrature did not converge near 0 (integrand may not be integrable)");
  }
  return head + kronrod(g, c, b, options);
}

// Segment index k with times[k] <= t < times[k+1] (clamped).
std::size_t locate(const std::vector<double>& times, double t) {
  auto it = std::upper_bound(times.begin(), times.end(), t);
  if (it == times.begin()) return 0;
  std::size_t k = static_cast<std::size_t>(it - times.begin()) - 1;
  return std::min(k, times.size() - 2);
}

}  // namespace

TimeGrid::TimeGrid(double horizon, std::size_t steps, bool skip_origin)
    : horizon_(horizon), steps_(steps), skip_origin_(skip_origin) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw DomainError("time grid horizon must be positive and finite");
  }
  if (steps == 0) throw DomainError("time grid needs at least one step");
  if (skip_origin && steps < 2) throw DomainError("skipping the origin needs at least two steps");
}

std::vector<double> TimeGrid::times() const {
  std::vector<double> out(steps_ + 1);
  for (std::size_t l = 0; l <= steps_; ++l) out[l] = (*this)[l];
  return out;
}

QuadVarModel QuadVarModel::lebesgue(double horizon) {
  if (!(horizon > 0.0)) throw DomainError("horizon must be positive");
  return QuadVarModel(Lebesgue{}, horizon);
}

QuadVarModel QuadVarModel::molchan(double hurst, double horizon) {
  check_hurst(hurst);
  if (!(horizon > 0.0)) throw DomainError("horizon must be positive");
  return QuadVarModel(MolchanPower{hurst}, horizon);
}

QuadVarModel QuadVarModel::tabulated(std::vector<double> times, std::vector<double> density) {
  if (times.size() < 2 || times.size() != density.size()) {
    throw DimensionError("tabulated density needs matching times/values with at least two nodes");
  }
  if (times.front() != 0.0) throw DomainError("tabulated density must start at t = 0");
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (k > 0 && !(times[k] > times[k - 1])) throw DomainError("tabulated times must increase");
    if (!(density[k] > 0.0) || !std::isfinite(density[k])) {
      throw DomainError("tabulated density must be positive and finite");
    }
  }
  std::vector<double> cumulative(times.size(), 0.0);
  for (std::size_t k = 1; k < times.size(); ++k) {
    cumulative[k] =
        cumulative[k - 1] + 0.5 * (density[k] + density[k - 1]) * (times[k] - times[k - 1]);
  }
  const double horizon = times.back();
  return QuadVarModel(Tabulated{std::move(times), std::move(density), std::move(cumulative)},
                      horizon);
}

std::optional<double> QuadVarModel::hurst() const {
  if (const auto* m = std::get_if<MolchanPower>(&model_)) return m->hurst;
  return std::nullopt;
}

bool QuadVarModel::is_unit_density() const {
  if (std::holds_alternative<Lebesgue>(model_)) return true;
  if (const auto* m = std::get_if<MolchanPower>(&model_)) return m->hurst == 0.5;
  return false;
}

double QuadVarModel::density(double t) const {
  check_time(*this, t);
  return std::visit(
      [t](const auto& m) -> double {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, Lebesgue>) {
          return 1.0;
        } else if constexpr (std::is_same_v<M, MolchanPower>) {
          return (2.0 - 2.0 * m.hurst) * std::pow(t, 1.0 - 2.0 * m.hurst);
        } else {
          const std::size_t k = locate(m.times, t);
          const double w = (t - m.times[k]) / (m.times[k + 1] - m.times[k]);
          return (1.0 - w) * m.density[k] + w * m.density[k + 1];
        }
      },
      model_);
}

double quad_var(const QuadVarModel& model, double t) {
  check_time(model, t);
  t = std::clamp(t, 0.0, model.horizon());
  return std::visit(
      [t](const auto& m) -> double {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, Lebesgue>) {
          return t;
        } else if constexpr (std::is_same_v<M, MolchanPower>) {
          return std::pow(t, 2.0 - 2.0 * m.hurst);
        } else {
          const std::size_t k = locate(m.times, t);
          const double dt = t - m.times[k];
          const double slope = (m.density[k + 1] - m.density[k]) / (m.times[k + 1] - m.times[k]);
          return m.cumulative[k] + m.density[k] * dt + 0.5 * slope * dt * dt;
        }
      },
      model.variant());
}

double integrate_dt(const RealFunction& f, double a, double b, const QuadratureOptions& options) {
  if (!(a <= b)) throw DomainError("integration bounds must satisfy a <= b");
  return adaptive(f, a, b, options);
}

double integrate_dqv(const RealFunction& f, const QuadVarModel& model, double a, double b,
                     const QuadratureOptions& options) {
  if (!(a <= b)) throw DomainError("integration bounds must satisfy a <= b");
  check_time(model, a);
  check_time(model, b);
  a = std::max(a, 0.0);
  b = std::min(b, model.horizon());
  if (a == b) return 0.0;

  return std::visit(
      [&](const auto& m) -> double {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, Lebesgue>) {
          return adaptive(f, a, b, options);
        } else if constexpr (std::is_same_v<M, MolchanPower>) {
          const double p = 2.0 - 2.0 * m.hurst;
          if (p == 1.0) return adaptive(f, a, b, options);
          const double inv_p = 1.0 / p;
          auto g = [&f, inv_p](double u) { return f(std::pow(u, inv_p)); };
          return adaptive(g, std::pow(a, p), std::pow(b, p), options);
        } else {
          // Density is linear on each table segment; integrate segment by segment.
          const std::size_t first = locate(m.times, a);
          const std::size_t last = locate(m.times, b);
          double total = 0.0;
          for (std::size_t k = first; k <= last; ++k) {
            const double lo = std::max(a, m.times[k]);
            const double hi = std::min(b, m.times[k + 1]);
            if (hi <= lo) continue;
            const double t0 = m.times[k];
            const double d0 = m.density[k];
            const double slope = (m.density[k + 1] - d0) / (m.times[k + 1] - t0);
            auto g = [&f, t0, d0, slope](double s) { return f(s) * (d0 + slope * (s - t0)); };
            total += adaptive(g, lo, hi, options);
          }
          return total;
        }
      },
      model.variant());
}

SamplePath::SamplePath(TimeGrid g, std::vector<double> v) : grid(g), values(std::move(v)) {
  if (values.size() != grid.steps() + 1) {
    throw DimensionError("sample path length " + std::to_string(values.size()) +
                         " does not match grid with " + std::to_string(grid.steps()) + " steps");
  }
}

Ensemble::Ensemble(TimeGrid grid, std::vector<std::vector<double>> paths)
    : grid_(grid), paths_(std::move(paths)) {
  if (paths_.empty()) throw DimensionError("an ensemble needs at least one path");
  for (const auto& p : paths_) {
    if (p.size() != grid_.steps() + 1) {
      throw DimensionError("ensemble path length does not match the shared grid");
    }
  }
}

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

std::vector<double> pooled_increments(const Ensemble& ensemble) {
  const std::size_t n = ensemble.grid().steps();
  const std::size_t copies = ensemble.size();
  std::vector<double> mean(n);
  std::vector<double> buffer(copies);
  for (std::size_t l = 0; l < n; ++l) {
    for (std::size_t i = 0; i < copies; ++i) {
      const auto path = ensemble.path(i);
      buffer[i] = path[l + 1] - path[l];
    }
    mean[l] = pairwise_sum(buffer) / static_cast<double>(copies);
  }
  return mean;
}

}  // namespace mdrift

#include "mdrift/fracops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <string>
#include <tuple>

#include "mdrift/quadrature.hpp"

namespace mdrift {

namespace {

void check_hurst(double hurst) {
  if (!(hurst >= 0.5 && hurst < 1.0)) {
    throw DomainError("Hurst index must lie in [1/2, 1), got " + std::to_string(hurst));
  }
}

// Gauss-Jacobi rules are reused across thousands of evaluation points.
const QuadratureRule& cached_rule(std::size_t order, double alpha, double beta) {
  static std::mutex mutex;
  static std::map<std::tuple<std::size_t, double, double>, QuadratureRule> cache;
  std::lock_guard lock(mutex);
  auto key = std::make_tuple(order, alpha, beta);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, gauss_jacobi(order, alpha, beta)).first;
  return it->second;
}

}  // namespace

HurstConstants HurstConstants::of(double hurst) {
  check_hurst(hurst);
  const double g = std::tgamma(1.5 - hurst);
  const double c = std::sqrt(std::tgamma(3.0 - 2.0 * hurst) /
                             (2.0 * hurst * g * g * g * std::tgamma(hurst + 0.5)));
  const double c_bar = hurst > 0.5
                           ? (2.0 - 2.0 * hurst) / (c * g * std::tgamma(hurst - 0.5))
                           : std::numeric_limits<double>::quiet_NaN();
  return HurstConstants{hurst, c, c_bar};
}

double molchan_kernel(double t, double s, double hurst) {
  if (!(s > 0.0 && s < t)) return 0.0;
  const double e = 0.5 - hurst;
  return HurstConstants::of(hurst).c * std::pow(s, e) * std::pow(t - s, e);
}

FunctionOnGrid::FunctionOnGrid(std::vector<double> times, std::vector<double> values)
    : times_(std::move(times)), values_(std::move(values)) {
  if (times_.size() != values_.size() || times_.empty()) {
    throw DimensionError("function table needs matching, non-empty times and values");
  }
  for (std::size_t k = 1; k < times_.size(); ++k) {
    if (!(times_[k] > times_[k - 1])) throw DomainError("function table times must increase");
  }
}

double FunctionOnGrid::operator()(double t) const {
  if (times_.size() == 1) return values_.front();
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  std::size_t k = it == times_.begin() ? 0 : static_cast<std::size_t>(it - times_.begin()) - 1;
  k = std::min(k, times_.size() - 2);
  const double w = (t - times_[k]) / (times_[k + 1] - times_[k]);
  return (1.0 - w) * values_[k] + w * values_[k + 1];
}

double j_transform(const RealFunction& q, double t, double hurst, std::size_t order) {
  check_hurst(hurst);
  if (!(t > 0.0)) return 0.0;
  const double e = 0.5 - hurst;
  const auto& rule = cached_rule(order, e, e);
  return HurstConstants::of(hurst).c * jacobi_integral(rule, e, e, t, q);
}

FunctionOnGrid forward_J(const RealFunction& q, std::span<const double> times, double horizon,
                         double hurst, const FracOptions& options) {
  check_hurst(hurst);
  std::vector<double> out_t(times.begin(), times.end());
  std::vector<double> out_v(times.size());
  if (hurst == 0.5) {
    for (std::size_t k = 0; k < times.size(); ++k) out_v[k] = q(times[k]);
    return FunctionOnGrid(std::move(out_t), std::move(out_v));
  }
  // j(Q)(t) = c_H t^{2-2H} F(t) with F(t) = \int_0^1 u^e (1-u)^e Q(t u) du, e = 1/2 - H, so
  // J(Q)(t) = c_H (F(t) + t F'(t) / (2-2H)). F is as smooth as Q; F' by differences.
  const double e = 0.5 - hurst;
  const auto& rule = cached_rule(options.order, e, e);
  const double c = HurstConstants::of(hurst).c;
  auto F = [&](double t) {
    return jacobi_integral(rule, e, e, 1.0, [&](double u) { return q(t * u); });
  };
  const double h = horizon / static_cast<double>(options.diff_steps);
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double t = times[k];
    if (!(t > 0.0)) throw DomainError("forward transform is defined for t > 0 only");
    const double d = std::min(h, 0.5 * t);
    double deriv;
    if (t + d <= horizon * (1.0 + 1e-12)) {
      deriv = (F(t + d) - F(t - d)) / (2.0 * d);
    } else {
      deriv = (3.0 * F(t) - 4.0 * F(t - d) + F(t - 2.0 * d)) / (2.0 * d);
    }
    out_v[k] = c * (F(t) + t * deriv / (2.0 - 2.0 * hurst));
  }
  return FunctionOnGrid(std::move(out_t), std::move(out_v));
}

FunctionOnGrid forward_J(const FunctionOnGrid& q, double hurst, const FracOptions& options) {
  std::vector<double> times;
  for (double t : q.times()) {
    if (t > 0.0) times.push_back(t);
  }
  if (times.empty()) throw DomainError("function table has no positive nodes");
  return forward_J([&q](double s) { return q(s); }, times, q.times().back(), hurst, options);
}

double inverse_Jbar_at(const RealFunction& iota, double t, double hurst, std::size_t order) {
  check_hurst(hurst);
  if (hurst == 0.5) {
    throw CapabilityError("the inverse transform is the identity at H = 1/2; use J_hat directly");
  }
  if (!(t > 0.0)) return 0.0;
  const double a = hurst - 1.5;
  const double b = 1.0 - 2.0 * hurst;
  const auto& rule = cached_rule(order, a, b);
  return HurstConstants::of(hurst).c_bar * std::pow(t, hurst - 0.5) *
         jacobi_integral(rule, a, b, t, iota);
}

FunctionOnGrid inverse_Jbar(const RealFunction& iota, std::span<const double> times,
                            double hurst, std::size_t order) {
  std::vector<double> out_t(times.begin(), times.end());
  std::vector<double> out_v(times.size());
  for (std::size_t k = 0; k < times.size(); ++k) {
    out_v[k] = inverse_Jbar_at(iota, times[k], hurst, order);
  }
  return FunctionOnGrid(std::move(out_t), std::move(out_v));
}

FunctionOnGrid inverse_Jbar(const FunctionOnGrid& iota, double hurst, std::size_t order) {
  std::vector<double> times;
  for (double t : iota.times()) {
    if (t > 0.0) times.push_back(t);
  }
  return inverse_Jbar([&iota](double s) { return iota(s); }, times, hurst, order);
}

std::vector<double> output_times(double horizon, std::size_t points, double start_fraction) {
  if (points < 2) throw DomainError("an output grid needs at least two points");
  const double start = start_fraction * horizon;
  std::vector<double> out(points);
  for (std::size_t k = 0; k < points; ++k) {
    out[k] = start + (horizon - start) * static_cast<double>(k) / static_cast<double>(points - 1);
  }
  return out;
}

FunctionOnGrid estimate_Q(const FitResult& fit, const BasisFamily& family, double hurst,
                          std::span<const double> times, std::size_t order) {
  check_hurst(hurst);
  auto j_hat = [&](double s) { return fit.value(family, s); };
  if (hurst == 0.5) {
    std::vector<double> values(times.size());
    for (std::size_t k = 0; k < times.size(); ++k) values[k] = j_hat(times[k]);
    return FunctionOnGrid(std::vector<double>(times.begin(), times.end()), std::move(values));
  }
  return inverse_Jbar(j_hat, times, hurst, order);
}

}  // namespace mdrift

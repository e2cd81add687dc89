#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mdrift/basis.hpp"
#include "mdrift/core.hpp"
#include "mdrift/estimator.hpp"

namespace mdrift {

/// Normalizing constants of the Molchan kernel and of its inverse.
struct HurstConstants {
  double hurst;
  double c;      // c_H, equal to 1 at H = 1/2
  double c_bar;  // (2-2H) / (c_H Gamma(3/2-H) Gamma(H-1/2)), H > 1/2 only (NaN at 1/2)

  static HurstConstants of(double hurst);
};

/// l(t,s) = c_H s^{1/2-H} (t-s)^{1/2-H} on 0 < s < t, zero elsewhere.
double molchan_kernel(double t, double s, double hurst);

/// Samples of a function on increasing nodes, read back by linear interpolation
/// (linear extrapolation outside the node range).
class FunctionOnGrid {
 public:
  FunctionOnGrid(std::vector<double> times, std::vector<double> values);

  const std::vector<double>& times() const { return times_; }
  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return times_.size(); }

  double operator()(double t) const;

 private:
  std::vector<double> times_;
  std::vector<double> values_;
};

struct FracOptions {
  std::size_t order = 64;               // Gauss-Jacobi nodes per integral
  std::size_t diff_steps = 2048;        // central-difference step is T / diff_steps
};

/// j(Q)(t) = \int_0^t l(t,s) Q(s) ds.
double j_transform(const RealFunction& q, double t, double hurst, std::size_t order = 64);

/// J(Q)(t) = (2-2H)^{-1} t^{2H-1} j(Q)'(t), evaluated at each of `times` (all > 0).
/// `horizon` bounds the difference stencil. At H = 1/2 this is Q itself.
FunctionOnGrid forward_J(const RealFunction& q, std::span<const double> times, double horizon,
                         double hurst, const FracOptions& options = {});

/// Grid version: output on the nodes of `q` other than t = 0.
FunctionOnGrid forward_J(const FunctionOnGrid& q, double hurst, const FracOptions& options = {});

/// Jbar(iota)(t) = c_bar_H t^{H-1/2} \int_0^t (t-s)^{H-3/2} s^{1-2H} iota(s) ds.
/// Throws CapabilityError at H = 1/2 (the transform is then the identity).
double inverse_Jbar_at(const RealFunction& iota, double t, double hurst, std::size_t order = 64);

FunctionOnGrid inverse_Jbar(const RealFunction& iota, std::span<const double> times,
                            double hurst, std::size_t order = 64);

/// Grid version: output on the nodes of `iota` other than t = 0.
FunctionOnGrid inverse_Jbar(const FunctionOnGrid& iota, double hurst, std::size_t order = 64);

/// `points` equispaced nodes from start_fraction * T to T.
std::vector<double> output_times(double horizon, std::size_t points,
                                 double start_fraction = 1.0 / 50.0);

/// Q_hat = Jbar(J_hat) for H > 1/2, J_hat itself at H = 1/2.
FunctionOnGrid estimate_Q(const FitResult& fit, const BasisFamily& family, double hurst,
                          std::span<const double> times, std::size_t order = 64);

}  // namespace mdrift

#pragma once

#include <cstddef>
#include <span>

#include "mdrift/basis.hpp"
#include "mdrift/core.hpp"
#include "mdrift/estimator.hpp"
#include "mdrift/fracops.hpp"

namespace mdrift {

/// Slices a path on [0, N(T + gap)] into N copies S^i_t = S_{(i-1)(T+gap) + t}, t in [0, T].
///
/// T and gap must be whole multiples of the source step. The copies share a
/// grid with T / step steps.
Ensemble segment(const SamplePath& source, std::size_t copies, double horizon, double gap = 0.0,
                 bool skip_origin = false);

/// Inverse of a gap-free segmentation.
SamplePath concatenate(const Ensemble& copies);

/// dZ^i_l = (S^i_{l+1} - S^i_l) / (sigma S^i_l).
Ensemble bs_build_z(const Ensemble& prices, double sigma);

/// b_hat = scale * J_hat, with the selected fit.
struct DriftEstimate {
  FitResult fit;
  BasisFamily family;
  double scale;

  double operator()(double t) const { return scale * fit.value(family, t); }
};

/// Drift of the non-autonomous Black-Scholes model; <W>_t = t.
DriftEstimate estimate_drift_bs(const Ensemble& z, const BasisFamily& family,
                                std::span<const std::size_t> dims, double sigma,
                                const PenaltyConfig& config);

/// Realized volatility sqrt(sum (log S_{l+1} - log S_l)^2 / span), span = grid horizon.
double estimate_sigma(const SamplePath& prices);

/// Z^i_t = (c_H / upsilon) \int_0^t s^{1/2-H} (t-s)^{1/2-H} d sigma^i_s / sigma^i_s.
///
/// Interior cells use the kernel at the cell midpoint; the two cells touching
/// the kernel singularities use the exact cell average of the kernel. Z is
/// returned on every `stride`-th node of the copy grid.
Ensemble fsv_build_z(const Ensemble& vols, double upsilon, double hurst, std::size_t stride = 1);

struct RhoEstimate {
  FitResult fit;
  FunctionOnGrid rho;  // upsilon * Q_hat on the output nodes
};

/// rho_hat = upsilon * Jbar(J_hat) with <M>_t = t^{2-2H}.
RhoEstimate estimate_rho(const Ensemble& z, const BasisFamily& family,
                         std::span<const std::size_t> dims, double upsilon, double hurst,
                         const PenaltyConfig& config, std::span<const double> times,
                         std::size_t order = 64);

struct BlockCovariance {
  double exact;
  double asymptote;
};

/// E[B^i_s B^k_t] for blocks i < k separated by (k - i)(T + gap), and its large-gap equivalent
/// H(2H-1) s t (k-i)^{2H-2} (T+gap)^{2H-2}.
BlockCovariance block_covariance_decay(double hurst, double horizon, double gap, double s,
                                       double t, std::size_t i, std::size_t k);

}  // namespace mdrift

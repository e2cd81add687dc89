#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mdrift/core.hpp"
#include "mdrift/rng.hpp"

namespace mdrift {

/// dZ_t = J0(t) d<M>_t + dM_t with M a Gaussian martingale of deterministic bracket.
struct MartingaleModel {
  RealFunction drift;  // J0
  QuadVarModel qv;
};

/// dS_t = S_t (b0(t) dt + sigma dW_t).
struct BlackScholesModel {
  double s0 = 1.0;
  double sigma = 1.0;
  RealFunction drift;  // b0
};

/// dS = S (b dt + sigma_t dW),  d sigma = sigma (rho0 dt + upsilon dB^H).
struct FracStochVolModel {
  double s0 = 1.0;
  double sigma0 = 1.0;
  double upsilon = 1.0;
  double hurst = 0.5;
  RealFunction price_drift;  // b
  RealFunction vol_drift;    // rho0
  double gap = 0.0;          // block separation Delta used when segmenting
};

/// Martingale with independent Gaussian increments of variance <M>_{t_{l+1}} - <M>_{t_l}.
SamplePath simulate_gaussian_martingale(const TimeGrid& grid, const QuadVarModel& qv,
                                        RngStream& rng);

/// Molchan martingale sqrt(2-2H) \int_0^t s^{1/2-H} dW_s, exact at the grid nodes.
SamplePath simulate_molchan(const TimeGrid& grid, double hurst, RngStream& rng);

/// Per-step drift integrals \int_{t_l}^{t_{l+1}} J0 d<M>, l = 0..n-1.
std::vector<double> drift_increments(const RealFunction& drift, const QuadVarModel& qv,
                                     const TimeGrid& grid);

SamplePath simulate_z(const MartingaleModel& model, const TimeGrid& grid, RngStream& rng);

/// Same as above with the drift integrals precomputed (they do not depend on the path).
SamplePath simulate_z(std::span<const double> drift_incr, const QuadVarModel& qv,
                      const TimeGrid& grid, RngStream& rng);

/// N copies of Z; copy i draws from stream (seed, first_stream + i).
Ensemble simulate_z_ensemble(std::span<const double> drift_incr, const QuadVarModel& qv,
                             const TimeGrid& grid, std::size_t copies, std::uint64_t seed,
                             std::uint64_t first_stream);

/// Exact law of the copy-averaged increments of N i.i.d. copies of Z:
/// drift_l + N(0, (<M>_{t_{l+1}} - <M>_{t_l}) / N).
std::vector<double> simulate_pooled_increments(std::span<const double> drift_incr,
                                               const QuadVarModel& qv, const TimeGrid& grid,
                                               std::size_t copies, RngStream& rng);

/// Exact log-scheme; the drift integral of each step uses Gauss-Legendre.
SamplePath simulate_black_scholes(const BlackScholesModel& model, const TimeGrid& grid,
                                  RngStream& rng);

enum class FbmMethod { Auto, Cholesky, DaviesHarte };

/// Draws fBm paths on a fixed grid; the factorization is computed once.
class FbmSampler {
 public:
  /// Cholesky is limited to n <= 2^16 steps.
  FbmSampler(const TimeGrid& grid, double hurst, FbmMethod method = FbmMethod::Auto);

  SamplePath sample(RngStream& rng) const;
  FbmMethod method() const { return method_; }

 private:
  void sample_increments(RngStream& rng, std::span<double> out) const;

  TimeGrid grid_;
  double hurst_;
  FbmMethod method_;
  Eigen::MatrixXd chol_;                // lower factor of the increment covariance
  std::vector<double> sqrt_eigen_;      // Davies-Harte: sqrt(lambda_k / M)
};

SamplePath simulate_fbm(const TimeGrid& grid, double hurst, RngStream& rng,
                        FbmMethod method = FbmMethod::Auto);

struct FsvPaths {
  SamplePath price;
  SamplePath vol;
};

/// sigma_t = sigma0 exp(\int_0^t rho0 + upsilon B_t - upsilon^2 t / 2 * 1{H = 1/2});
/// S by the log-scheme with sigma frozen at the left node of each step.
FsvPaths simulate_fsv(const FracStochVolModel& model, const TimeGrid& grid, RngStream& rng);

}  // namespace mdrift

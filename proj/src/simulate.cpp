#include "mdrift/simulate.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <complex>
#include <string>
#include <unsupported/Eigen/FFT>

namespace mdrift {

namespace {

constexpr std::size_t kCholeskyMaxSteps = std::size_t{1} << 16;
constexpr std::size_t kAutoCholeskyLimit = 1024;

void check_hurst(double hurst) {
  if (!(hurst >= 0.5 && hurst < 1.0)) {
    throw DomainError("Hurst index must lie in [1/2, 1), got " + std::to_string(hurst));
  }
}

double step_integral(const RealFunction& f, double a, double b) {
  return boost::math::quadrature::gauss<double, 10>::integrate(f, a, b);
}

std::vector<double> cumulate(std::span<const double> increments) {
  std::vector<double> out(increments.size() + 1, 0.0);
  for (std::size_t l = 0; l < increments.size(); ++l) out[l + 1] = out[l] + increments[l];
  return out;
}

// Autocovariance of unit-step fractional Gaussian noise at lag k.
double fgn_autocov(std::size_t k, double hurst) {
  const double h2 = 2.0 * hurst;
  const double kk = static_cast<double>(k);
  if (k == 0) return 1.0;
  return 0.5 * (std::pow(kk + 1.0, h2) - 2.0 * std::pow(kk, h2) + std::pow(kk - 1.0, h2));
}

}  // namespace

SamplePath simulate_gaussian_martingale(const TimeGrid& grid, const QuadVarModel& qv,
                                        RngStream& rng) {
  const std::size_t n = grid.steps();
  std::vector<double> incr(n);
  double prev = 0.0;
  for (std::size_t l = 0; l < n; ++l) {
    const double next = quad_var(qv, grid[l + 1]);
    incr[l] = std::sqrt(next - prev) * rng.normal();
    prev = next;
  }
  return SamplePath(grid, cumulate(incr));
}

SamplePath simulate_molchan(const TimeGrid& grid, double hurst, RngStream& rng) {
  check_hurst(hurst);
  return simulate_gaussian_martingale(grid, QuadVarModel::molchan(hurst, grid.horizon()), rng);
}

std::vector<double> drift_increments(const RealFunction& drift, const QuadVarModel& qv,
                                     const TimeGrid& grid) {
  std::vector<double> out(grid.steps());
  for (std::size_t l = 0; l < grid.steps(); ++l) {
    out[l] = integrate_dqv(drift, qv, grid[l], grid[l + 1]);
  }
  return out;
}

SamplePath simulate_z(std::span<const double> drift_incr, const QuadVarModel& qv,
                      const TimeGrid& grid, RngStream& rng) {
  if (drift_incr.size() != grid.steps()) {
    throw DimensionError("drift increments do not match the grid");
  }
  const std::size_t n = grid.steps();
  std::vector<double> values(n + 1, 0.0);
  double prev = 0.0;
  for (std::size_t l = 0; l < n; ++l) {
    const double next = quad_var(qv, grid[l + 1]);
    const double noise = std::sqrt(next - prev) * rng.normal();
    values[l + 1] = values[l] + (drift_incr[l] + noise);
    prev = next;
  }
  return SamplePath(grid, std::move(values));
}

SamplePath simulate_z(const MartingaleModel& model, const TimeGrid& grid, RngStream& rng) {
  const auto drift = drift_increments(model.drift, model.qv, grid);
  return simulate_z(drift, model.qv, grid, rng);
}

Ensemble simulate_z_ensemble(std::span<const double> drift_incr, const QuadVarModel& qv,
                             const TimeGrid& grid, std::size_t copies, std::uint64_t seed,
                             std::uint64_t first_stream) {
  std::vector<std::vector<double>> paths;
  paths.reserve(copies);
  for (std::size_t i = 0; i < copies; ++i) {
    RngStream rng(seed, first_stream + i);
    paths.push_back(simulate_z(drift_incr, qv, grid, rng).values);
  }
  return Ensemble(grid, std::move(paths));
}

std::vector<double> simulate_pooled_increments(std::span<const double> drift_incr,
                                               const QuadVarModel& qv, const TimeGrid& grid,
                                               std::size_t copies, RngStream& rng) {
  if (drift_incr.size() != grid.steps()) {
    throw DimensionError("drift increments do not match the grid");
  }
  if (copies == 0) throw DimensionError("at least one copy is required");
  const double inv_n = 1.0 / static_cast<double>(copies);
  std::vector<double> out(grid.steps());
  double prev = 0.0;
  for (std::size_t l = 0; l < grid.steps(); ++l) {
    const double next = quad_var(qv, grid[l + 1]);
    out[l] = drift_incr[l] + std::sqrt((next - prev) * inv_n) * rng.normal();
    prev = next;
  }
  return out;
}

SamplePath simulate_black_scholes(const BlackScholesModel& model, const TimeGrid& grid,
                                  RngStream& rng) {
  if (!(model.s0 > 0.0)) throw DomainError("initial price must be positive");
  if (!(model.sigma >= 0.0)) throw DomainError("volatility must be nonnegative");
  const std::size_t n = grid.steps();
  const double h = grid.step();
  const double sqrt_h = std::sqrt(h);
  const double ito = 0.5 * model.sigma * model.sigma;
  std::vector<double> values(n + 1);
  values[0] = model.s0;
  double log_s = std::log(model.s0);
  for (std::size_t l = 0; l < n; ++l) {
    const double a = grid[l];
    const double b = grid[l + 1];
    const double drift = model.drift ? step_integral(model.drift, a, b) : 0.0;
    log_s += drift - ito * (b - a) + model.sigma * sqrt_h * rng.normal();
    values[l + 1] = std::exp(log_s);
  }
  return SamplePath(grid, std::move(values));
}

FbmSampler::FbmSampler(const TimeGrid& grid, double hurst, FbmMethod method)
    : grid_(grid), hurst_(hurst), method_(method) {
  check_hurst(hurst);
  const std::size_t n = grid.steps();
  if (method_ == FbmMethod::Auto) {
    method_ = n <= kAutoCholeskyLimit ? FbmMethod::Cholesky : FbmMethod::DaviesHarte;
  }
  if (hurst_ == 0.5) return;  // independent increments, nothing to factor

  if (method_ == FbmMethod::Cholesky) {
    if (n > kCholeskyMaxSteps) {
      throw DomainError("Cholesky fBm is limited to 2^16 steps, got " + std::to_string(n));
    }
    const auto dim = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd cov(dim, dim);
    for (Eigen::Index r = 0; r < dim; ++r) {
      for (Eigen::Index c = 0; c <= r; ++c) {
        cov(r, c) = cov(c, r) = fgn_autocov(static_cast<std::size_t>(r - c), hurst_);
      }
    }
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) {
      throw DecompositionError("fBm increment covariance is not positive definite (H = " +
                               std::to_string(hurst_) + ", n = " + std::to_string(n) + ")");
    }
    chol_ = llt.matrixL();
    return;
  }

  // Circulant embedding of size M = 2^k >= 2n.
  std::size_t half = 1;
  while (half < n) half <<= 1;
  const std::size_t m = 2 * half;
  std::vector<std::complex<double>> row(m), eig(m);
  for (std::size_t k = 0; k <= half; ++k) row[k] = fgn_autocov(k, hurst_);
  for (std::size_t k = half + 1; k < m; ++k) row[k] = row[m - k];
  Eigen::FFT<double> fft;
  fft.fwd(eig, row);
  sqrt_eigen_.resize(m);
  for (std::size_t k = 0; k < m; ++k) {
    double lambda = eig[k].real();
    if (lambda < 0.0) {
      if (lambda < -1e-10 * std::abs(eig[0].real())) {
        throw DecompositionError("circulant embedding has a negative eigenvalue (H = " +
                                 std::to_string(hurst_) + ", n = " + std::to_string(n) + ")");
      }
      lambda = 0.0;
    }
    sqrt_eigen_[k] = std::sqrt(lambda / static_cast<double>(m));
  }
}

void FbmSampler::sample_increments(RngStream& rng, std::span<double> out) const {
  const std::size_t n = out.size();
  if (hurst_ == 0.5) {
    for (double& x : out) x = rng.normal();
    return;
  }
  if (method_ == FbmMethod::Cholesky) {
    Eigen::VectorXd xi(static_cast<Eigen::Index>(n));
    for (Eigen::Index k = 0; k < xi.size(); ++k) xi(k) = rng.normal();
    const Eigen::VectorXd x = chol_.triangularView<Eigen::Lower>() * xi;
    for (std::size_t k = 0; k < n; ++k) out[k] = x(static_cast<Eigen::Index>(k));
    return;
  }
  const std::size_t m = sqrt_eigen_.size();
  const std::size_t half = m / 2;
  std::vector<std::complex<double>> coeff(m), values(m);
  coeff[0] = sqrt_eigen_[0] * rng.normal();
  coeff[half] = sqrt_eigen_[half] * rng.normal();
  for (std::size_t k = 1; k < half; ++k) {
    const double re = rng.normal();
    const double im = rng.normal();
    const double s = sqrt_eigen_[k] * std::sqrt(0.5);
    coeff[k] = std::complex<double>(s * re, s * im);
    coeff[m - k] = std::conj(coeff[k]);
  }
  Eigen::FFT<double> fft;
  fft.fwd(values, coeff);
  for (std::size_t k = 0; k < n; ++k) out[k] = values[k].real();
}

SamplePath FbmSampler::sample(RngStream& rng) const {
  const std::size_t n = grid_.steps();
  std::vector<double> incr(n);
  sample_increments(rng, incr);
  const double scale = std::pow(grid_.step(), hurst_);
  for (double& x : incr) x *= scale;
  return SamplePath(grid_, cumulate(incr));
}

SamplePath simulate_fbm(const TimeGrid& grid, double hurst, RngStream& rng, FbmMethod method) {
  return FbmSampler(grid, hurst, method).sample(rng);
}

FsvPaths simulate_fsv(const FracStochVolModel& model, const TimeGrid& grid, RngStream& rng) {
  check_hurst(model.hurst);
  if (!(model.s0 > 0.0) || !(model.sigma0 > 0.0)) {
    throw DomainError("initial price and volatility must be positive");
  }
  if (!(model.upsilon >= 0.0)) throw DomainError("vol-of-vol must be nonnegative");
  const std::size_t n = grid.steps();
  const double h = grid.step();
  const double sqrt_h = std::sqrt(h);

  const SamplePath fbm = simulate_fbm(grid, model.hurst, rng);
  const bool brownian = model.hurst == 0.5;

  std::vector<double> vol(n + 1), price(n + 1);
  double rho_integral = 0.0;
  vol[0] = model.sigma0;
  for (std::size_t l = 0; l < n; ++l) {
    if (model.vol_drift) rho_integral += step_integral(model.vol_drift, grid[l], grid[l + 1]);
    const double t = grid[l + 1];
    double exponent = rho_integral + model.upsilon * fbm.values[l + 1];
    if (brownian) exponent -= 0.5 * model.upsilon * model.upsilon * t;
    vol[l + 1] = model.sigma0 * std::exp(exponent);
    if (!std::isfinite(vol[l + 1])) throw NumericError("volatility path overflowed");
  }

  price[0] = model.s0;
  double log_s = std::log(model.s0);
  for (std::size_t l = 0; l < n; ++l) {
    const double sigma = vol[l];
    const double drift =
        model.price_drift ? step_integral(model.price_drift, grid[l], grid[l + 1]) : 0.0;
    log_s += drift - 0.5 * sigma * sigma * h + sigma * sqrt_h * rng.normal();
    price[l + 1] = std::exp(log_s);
  }
  return FsvPaths{SamplePath(grid, std::move(price)), SamplePath(grid, std::move(vol))};
}

}  // namespace mdrift

#include "mdrift/apps.hpp"

#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <string>

namespace mdrift {

namespace {

std::size_t whole_steps(double length, double step, const char* what) {
  const double ratio = length / step;
  const double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio)) {
    throw DomainError(std::string(what) + " is not a whole number of source steps");
  }
  return static_cast<std::size_t>(rounded);
}

}  // namespace

Ensemble segment(const SamplePath& source, std::size_t copies, double horizon, double gap,
                 bool skip_origin) {
  if (copies == 0) throw DimensionError("at least one copy is required");
  if (!(gap >= 0.0)) throw DomainError("block gap must be nonnegative");
  const double h = source.grid.step();
  const std::size_t per_copy = whole_steps(horizon, h, "copy horizon");
  const std::size_t per_gap = gap > 0.0 ? whole_steps(gap, h, "block gap") : 0;
  if (per_copy == 0) throw DomainError("copy horizon shorter than one source step");
  const std::size_t stride = per_copy + per_gap;
  if ((copies - 1) * stride + per_copy > source.grid.steps()) {
    throw DimensionError("source path too short for " + std::to_string(copies) + " copies");
  }
  std::vector<std::vector<double>> paths(copies);
  for (std::size_t i = 0; i < copies; ++i) {
    const auto begin = source.values.begin() + static_cast<std::ptrdiff_t>(i * stride);
    paths[i].assign(begin, begin + static_cast<std::ptrdiff_t>(per_copy + 1));
  }
  return Ensemble(TimeGrid(horizon, per_copy, skip_origin), std::move(paths));
}

SamplePath concatenate(const Ensemble& copies) {
  const std::size_t n = copies.grid().steps();
  std::vector<double> values;
  values.reserve(copies.size() * n + 1);
  for (std::size_t i = 0; i < copies.size(); ++i) {
    const auto p = copies.path(i);
    const std::size_t skip = i == 0 ? 0 : 1;
    values.insert(values.end(), p.begin() + static_cast<std::ptrdiff_t>(skip), p.end());
  }
  return SamplePath(TimeGrid(copies.grid().horizon() * static_cast<double>(copies.size()),
                             copies.size() * n),
                    std::move(values));
}

Ensemble bs_build_z(const Ensemble& prices, double sigma) {
  if (!(sigma > 0.0)) throw DomainError("volatility must be positive");
  std::vector<std::vector<double>> paths(prices.size());
  for (std::size_t i = 0; i < prices.size(); ++i) {
    const auto s = prices.path(i);
    auto& z = paths[i];
    z.assign(s.size(), 0.0);
    for (std::size_t l = 0; l + 1 < s.size(); ++l) {
      if (!(s[l] > 0.0)) throw DomainError("prices must be positive");
      z[l + 1] = z[l] + (s[l + 1] - s[l]) / (sigma * s[l]);
    }
    if (!(s.back() > 0.0)) throw DomainError("prices must be positive");
  }
  return Ensemble(prices.grid(), std::move(paths));
}

DriftEstimate estimate_drift_bs(const Ensemble& z, const BasisFamily& family,
                                std::span<const std::size_t> dims, double sigma,
                                const PenaltyConfig& config) {
  if (!(sigma > 0.0)) throw DomainError("volatility must be positive");
  const auto qv = QuadVarModel::lebesgue(z.grid().horizon());
  return DriftEstimate{select_model(z, family, dims, qv, config), family, sigma};
}

double estimate_sigma(const SamplePath& prices) {
  double sum = 0.0;
  for (std::size_t l = 0; l + 1 < prices.values.size(); ++l) {
    const double a = prices.values[l];
    const double b = prices.values[l + 1];
    if (!(a > 0.0) || !(b > 0.0)) throw DomainError("prices must be positive");
    const double r = std::log(b) - std::log(a);
    sum += r * r;
  }
  return std::sqrt(sum / prices.grid.horizon());
}

Ensemble fsv_build_z(const Ensemble& vols, double upsilon, double hurst, std::size_t stride) {
  if (!(upsilon > 0.0)) throw DomainError("vol-of-vol must be positive");
  if (!(hurst >= 0.5 && hurst < 1.0)) throw DomainError("Hurst index must lie in [1/2, 1)");
  const TimeGrid& grid = vols.grid();
  const std::size_t n = grid.steps();
  if (stride == 0 || n % stride != 0) throw DomainError("stride must divide the step count");
  const std::size_t out_steps = n / stride;
  const double h = grid.step();
  const double e = 0.5 - hurst;
  const bool brownian = hurst == 0.5;
  const double scale = HurstConstants::of(hurst).c / upsilon;

  // Interior kernel at the midpoint of cell l for t = K h factorizes as g[l] g[K-1-l].
  std::vector<double> g(n);
  for (std::size_t l = 0; l < n; ++l) g[l] = brownian ? 1.0 : std::pow((l + 0.5) * h, e);

  // Exact cell average of the kernel over [0, h] (and, by symmetry, [t-h, t]).
  auto edge_weight = [&](std::size_t k) {
    if (brownian) return 1.0;
    const double t = static_cast<double>(k) * h;
    const double x = 1.0 / static_cast<double>(k);
    return std::pow(t, 2.0 * e + 1.0) * boost::math::beta(e + 1.0, e + 1.0, x) / h;
  };
  std::vector<double> edge(n + 1, 0.0);
  for (std::size_t k = 1; k <= n; ++k) edge[k] = edge_weight(k);

  std::vector<std::vector<double>> paths(vols.size());
  std::vector<double> r(n);
  for (std::size_t i = 0; i < vols.size(); ++i) {
    const auto sig = vols.path(i);
    for (std::size_t l = 0; l < n; ++l) {
      if (!(sig[l] > 0.0)) throw DomainError("volatility path must be positive");
      r[l] = (sig[l + 1] - sig[l]) / sig[l];
    }
    auto& z = paths[i];
    z.assign(out_steps + 1, 0.0);
    for (std::size_t k = 1; k <= out_steps; ++k) {
      const std::size_t big_k = k * stride;
      double sum;
      if (big_k == 1) {
        sum = edge[1] * r[0];
      } else {
        sum = edge[big_k] * (r[0] + r[big_k - 1]);
        for (std::size_t l = 1; l + 1 < big_k; ++l) sum += g[l] * g[big_k - 1 - l] * r[l];
      }
      z[k] = scale * sum;
    }
  }
  return Ensemble(TimeGrid(grid.horizon(), out_steps, grid.skips_origin()), std::move(paths));
}

RhoEstimate estimate_rho(const Ensemble& z, const BasisFamily& family,
                         std::span<const std::size_t> dims, double upsilon, double hurst,
                         const PenaltyConfig& config, std::span<const double> times,
                         std::size_t order) {
  if (!(upsilon > 0.0)) throw DomainError("vol-of-vol must be positive");
  const auto qv = QuadVarModel::molchan(hurst, z.grid().horizon());
  FitResult fit = select_model(z, family, dims, qv, config);
  FunctionOnGrid q = estimate_Q(fit, family, hurst, times, order);
  std::vector<double> values = q.values();
  for (double& v : values) v *= upsilon;
  return RhoEstimate{std::move(fit), FunctionOnGrid(q.times(), std::move(values))};
}

BlockCovariance block_covariance_decay(double hurst, double horizon, double gap, double s,
                                       double t, std::size_t i, std::size_t k) {
  if (!(i < k)) throw DomainError("block indices must satisfy i < k");
  if (!(s >= 0.0 && s < t && t <= horizon)) throw DomainError("times must satisfy 0 <= s < t <= T");
  if (!(hurst >= 0.5 && hurst < 1.0)) throw DomainError("Hurst index must lie in [1/2, 1)");
  if (hurst == 0.5) return {0.0, 0.0};
  const double h2 = 2.0 * hurst;
  const double lag = static_cast<double>(k - i);
  const double sep = lag * (horizon + gap);
  // (1+x)^{2H} - 1 without cancellation for small x.
  auto f = [h2](double x) { return std::expm1(h2 * std::log1p(x)); };
  const double exact =
      s == 0.0 ? 0.0 : 0.5 * std::pow(sep, h2) * (f(t / sep) + f(-s / sep) - f((t - s) / sep));
  const double asymptote =
      hurst * (h2 - 1.0) * s * t * std::pow(lag, h2 - 2.0) * std::pow(horizon + gap, h2 - 2.0);
  return {exact, asymptote};
}

}  // namespace mdrift

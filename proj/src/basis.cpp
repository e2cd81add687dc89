#include "mdrift/basis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace mdrift {

namespace {

constexpr double kMaxGramianCondition = 1e12;

}  // namespace

double trig_eval(std::size_t j, double t, double horizon) {
  if (j == 0) throw DomainError("basis indices start at 1");
  if (j == 1) return std::sqrt(1.0 / horizon);
  const double freq = 2.0 * std::numbers::pi * static_cast<double>(j / 2) / horizon;
  const double amp = std::sqrt(2.0 / horizon);
  return j % 2 == 0 ? amp * std::cos(freq * t) : amp * std::sin(freq * t);
}

double trig_deriv(std::size_t j, double t, double horizon) {
  if (j == 0) throw DomainError("basis indices start at 1");
  if (j == 1) return 0.0;
  const double freq = 2.0 * std::numbers::pi * static_cast<double>(j / 2) / horizon;
  const double amp = std::sqrt(2.0 / horizon) * freq;
  return j % 2 == 0 ? -amp * std::sin(freq * t) : amp * std::cos(freq * t);
}

BasisFamily BasisFamily::trigonometric(double horizon, std::size_t max_dim) {
  if (!(horizon > 0.0)) throw DomainError("basis horizon must be positive");
  if (max_dim == 0) throw DomainError("basis dimension must be positive");
  return BasisFamily(BasisKind::Trigonometric, horizon, max_dim);
}

void BasisFamily::check_index(std::size_t j) const {
  if (j == 0 || j > max_dim_) {
    throw DimensionError("basis index " + std::to_string(j) + " outside 1.." +
                         std::to_string(max_dim_));
  }
}

double BasisFamily::operator()(std::size_t j, double t) const {
  check_index(j);
  if (kind_ == BasisKind::Trigonometric) return trig_eval(j, t, horizon_);
  const double weight = 1.0 / std::sqrt(qv_->density(t));
  double sum = 0.0;
  for (std::size_t k = 1; k <= j; ++k) {
    sum += coefficients_(static_cast<Eigen::Index>(j - 1), static_cast<Eigen::Index>(k - 1)) *
           trig_eval(k, t, horizon_);
  }
  return weight * sum;
}

double BasisFamily::derivative(std::size_t j, double t) const {
  if (kind_ != BasisKind::Trigonometric) {
    throw CapabilityError("derivatives are only available for the trigonometric basis");
  }
  check_index(j);
  return trig_deriv(j, t, horizon_);
}

void BasisFamily::evaluate(std::size_t m, double t, std::span<double> out) const {
  if (m > max_dim_) throw DimensionError("requested dimension exceeds the family size");
  if (out.size() < m) throw DimensionError("output buffer too small");
  if (kind_ == BasisKind::Trigonometric) {
    for (std::size_t j = 1; j <= m; ++j) out[j - 1] = trig_eval(j, t, horizon_);
    return;
  }
  std::vector<double> shapes(m);
  for (std::size_t k = 1; k <= m; ++k) shapes[k - 1] = trig_eval(k, t, horizon_);
  const double weight = 1.0 / std::sqrt(qv_->density(t));
  for (std::size_t j = 0; j < m; ++j) {
    double sum = 0.0;
    for (std::size_t k = 0; k <= j; ++k) {
      sum += coefficients_(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) * shapes[k];
    }
    out[j] = weight * sum;
  }
}

double BasisFamily::expand(std::span<const double> coeffs, double t) const {
  std::vector<double> values(coeffs.size());
  evaluate(coeffs.size(), t, values);
  double sum = 0.0;
  for (std::size_t j = 0; j < coeffs.size(); ++j) sum += coeffs[j] * values[j];
  return sum;
}

BasisFamily mu_weighted_basis(const QuadVarModel& qv, std::size_t m) {
  const double horizon = qv.horizon();
  if (qv.is_unit_density()) return BasisFamily::trigonometric(horizon, m);
  if (m == 0) throw DomainError("basis dimension must be positive");

  // Gramian of the shapes mu^{-1/2} trig_j in L^2(dt):
  //   \int trig_j trig_k / mu dt = \int (trig_j trig_k / mu^2) d<M>.
  const auto dim = static_cast<Eigen::Index>(m);
  Eigen::MatrixXd gram(dim, dim);
  for (std::size_t j = 1; j <= m; ++j) {
    for (std::size_t k = 1; k <= j; ++k) {
      auto f = [&](double s) {
        const double mu = qv.density(s);
        return trig_eval(j, s, horizon) * trig_eval(k, s, horizon) / (mu * mu);
      };
      const double v = integrate_dqv(f, qv, 0.0, horizon);
      gram(static_cast<Eigen::Index>(j - 1), static_cast<Eigen::Index>(k - 1)) = v;
      gram(static_cast<Eigen::Index>(k - 1), static_cast<Eigen::Index>(j - 1)) = v;
    }
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0) || hi / lo > kMaxGramianCondition) {
    throw IllConditionedBasisError("mu-weighted shape Gramian is ill-conditioned (m = " +
                                   std::to_string(m) + ", condition " +
                                   std::to_string(lo > 0.0 ? hi / lo : INFINITY) + ")");
  }

  // Modified Gram-Schmidt with one re-orthogonalization pass, in the G inner product.
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(dim, dim);  // column j: coefficients of phi_{j+1}
  for (Eigen::Index j = 0; j < dim; ++j) {
    Eigen::VectorXd v = Eigen::VectorXd::Unit(dim, j);
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index k = 0; k < j; ++k) {
        const double proj = q.col(k).dot(gram * v);
        v -= proj * q.col(k);
      }
    }
    const double norm = std::sqrt(v.dot(gram * v));
    q.col(j) = v / norm;
  }

  BasisFamily family(BasisKind::MuWeighted, horizon, m);
  family.qv_ = qv;
  family.coefficients_ = q.transpose();
  return family;
}

double basis_sup_deriv_sq(const BasisFamily& family, std::size_t m) {
  if (family.kind() != BasisKind::Trigonometric) {
    throw CapabilityError("R(m) is only available for the trigonometric basis");
  }
  if (m > family.max_dim()) throw DimensionError("dimension exceeds the family size");
  // Each (cos, sin) pair of frequency j contributes 8 pi^2 j^2 / T^3 at every t; a
  // trailing unpaired cosine contributes the same amount at its maximum.
  const double top = static_cast<double>(m / 2);
  const double sum_sq = top * (top + 1.0) * (2.0 * top + 1.0) / 6.0;
  const double T = family.horizon();
  return 8.0 * std::numbers::pi * std::numbers::pi * sum_sq / (T * T * T);
}

double basis_sup_deriv_sq_on_grid(const BasisFamily& family, std::size_t m, std::size_t points) {
  if (points < 2) throw DomainError("grid maximization needs at least two points");
  double best = 0.0;
  for (std::size_t k = 0; k < points; ++k) {
    const double t = family.horizon() * static_cast<double>(k) / static_cast<double>(points - 1);
    double sum = 0.0;
    for (std::size_t j = 1; j <= m; ++j) {
      const double d = family.derivative(j, t);
      sum += d * d;
    }
    best = std::max(best, sum);
  }
  return best;
}

}  // namespace mdrift

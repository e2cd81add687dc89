#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <optional>
#include <span>

#include "mdrift/core.hpp"

namespace mdrift {

enum class BasisKind { Trigonometric, MuWeighted };

/// phi_1 = sqrt(1/T), phi_{2j} = sqrt(2/T) cos(2 pi j t/T), phi_{2j+1} = sqrt(2/T) sin(2 pi j t/T).
double trig_eval(std::size_t j, double t, double horizon);
double trig_deriv(std::size_t j, double t, double horizon);

/// Nested family (phi_1, ..., phi_{m_N}) on [0, T], orthonormal in L^2(dt).
///
/// The mu-weighted family is stored as a lower-triangular change of basis from
/// the shapes mu^{-1/2} * trig_j, so phi_j only involves the first j shapes.
class BasisFamily {
 public:
  static BasisFamily trigonometric(double horizon, std::size_t max_dim);

  BasisKind kind() const { return kind_; }
  double horizon() const { return horizon_; }
  std::size_t max_dim() const { return max_dim_; }

  /// phi_j(t), j is 1-based.
  double operator()(std::size_t j, double t) const;
  /// phi_j'(t); trigonometric families only.
  double derivative(std::size_t j, double t) const;
  /// (phi_1(t), ..., phi_m(t)).
  void evaluate(std::size_t m, double t, std::span<double> out) const;
  /// sum_j coeffs[j] phi_{j+1}(t).
  double expand(std::span<const double> coeffs, double t) const;

  /// Rows: basis index; columns: shape index (mu-weighted family only).
  const Eigen::MatrixXd& change_of_basis() const { return coefficients_; }

 private:
  friend BasisFamily mu_weighted_basis(const QuadVarModel& qv, std::size_t m);
  BasisFamily(BasisKind kind, double horizon, std::size_t max_dim)
      : kind_(kind), horizon_(horizon), max_dim_(max_dim) {}

  void check_index(std::size_t j) const;

  BasisKind kind_;
  double horizon_;
  std::size_t max_dim_;
  std::optional<QuadVarModel> qv_;
  Eigen::MatrixXd coefficients_;
};

/// Gram-Schmidt orthonormalization in L^2([0,T], dt) of mu(t)^{-1/2} * trig_j(t).
///
/// Returns the plain trigonometric family when mu is identically one. Throws
/// IllConditionedBasisError if the shape Gramian has condition number above 1e12.
BasisFamily mu_weighted_basis(const QuadVarModel& qv, std::size_t m);

/// R(m) = sup_t sum_{j<=m} phi_j'(t)^2, in closed form (trigonometric families only).
double basis_sup_deriv_sq(const BasisFamily& family, std::size_t m);

/// Same supremum by brute-force maximization over `points` equispaced nodes of [0, T].
double basis_sup_deriv_sq_on_grid(const BasisFamily& family, std::size_t m, std::size_t points);

}  // namespace mdrift

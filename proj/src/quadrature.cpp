#include "mdrift/quadrature.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "mdrift/errors.hpp"

namespace mdrift {

QuadratureRule gauss_jacobi(std::size_t order, double alpha, double beta) {
  if (order == 0) throw DomainError("quadrature order must be positive");
  if (!(alpha > -1.0) || !(beta > -1.0)) {
    throw DomainError("Gauss-Jacobi exponents must exceed -1");
  }
  const auto n = static_cast<Eigen::Index>(order);
  const double ab = alpha + beta;

  // Symmetric tridiagonal Jacobi matrix of the monic recurrence.
  Eigen::VectorXd diag(n);
  Eigen::VectorXd off(std::max<Eigen::Index>(n - 1, 0));
  diag(0) = (beta - alpha) / (ab + 2.0);
  for (Eigen::Index k = 1; k < n; ++k) {
    const double kk = static_cast<double>(k);
    const double s = 2.0 * kk + ab;
    diag(k) = (beta * beta - alpha * alpha) / (s * (s + 2.0));
  }
  if (n > 1) {
    off(0) = std::sqrt(4.0 * (alpha + 1.0) * (beta + 1.0) / ((ab + 2.0) * (ab + 2.0) * (ab + 3.0)));
  }
  for (Eigen::Index k = 2; k < n; ++k) {
    const double kk = static_cast<double>(k);
    const double s = 2.0 * kk + ab;
    off(k - 1) = std::sqrt(4.0 * kk * (kk + alpha) * (kk + beta) * (kk + ab) /
                           (s * s * (s + 1.0) * (s - 1.0)));
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, off, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) throw NumericError("Gauss-Jacobi eigen-solve failed");

  // Total mass 2^{a+b+1} B(a+1, b+1), via lgamma to stay finite for large orders.
  const double mu0 = std::exp((ab + 1.0) * std::log(2.0) + std::lgamma(alpha + 1.0) +
                              std::lgamma(beta + 1.0) - std::lgamma(ab + 2.0));

  QuadratureRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double v0 = solver.eigenvectors()(0, k);
    rule.nodes[static_cast<std::size_t>(k)] = solver.eigenvalues()(k);
    rule.weights[static_cast<std::size_t>(k)] = mu0 * v0 * v0;
  }
  return rule;
}

QuadratureRule gauss_legendre(std::size_t order) { return gauss_jacobi(order, 0.0, 0.0); }

}  // namespace mdrift

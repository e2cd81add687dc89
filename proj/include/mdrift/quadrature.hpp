#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace mdrift {

/// Nodes and weights of an interpolatory rule on [-1, 1].
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Jacobi rule for the weight (1 - x)^alpha (1 + x)^beta on [-1, 1], alpha, beta > -1.
///
/// Built with the Golub-Welsch eigenvalue method; exact for polynomials of
/// degree <= 2 order - 1 against the weight.
QuadratureRule gauss_jacobi(std::size_t order, double alpha, double beta);

/// Gauss-Legendre rule (alpha = beta = 0).
QuadratureRule gauss_legendre(std::size_t order);

/// \int_0^t (t - s)^a s^b f(s) ds with the Gauss-Jacobi rule built for (alpha = a, beta = b).
template <class F>
double jacobi_integral(const QuadratureRule& rule, double a, double b, double t, F&& f) {
  // s = t (1 + x) / 2: (t - s)^a s^b ds = (t/2)^{a+b+1} (1 - x)^a (1 + x)^b dx.
  double sum = 0.0;
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
    sum += rule.weights[k] * f(0.5 * t * (1.0 + rule.nodes[k]));
  }
  return sum * std::pow(0.5 * t, a + b + 1.0);
}

}  // namespace mdrift

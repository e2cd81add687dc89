#include <doctest.h>

#include <cmath>

#include "mdrift/errors.hpp"
#include "mdrift/quadrature.hpp"

using namespace mdrift;

TEST_CASE("Gauss-Legendre integrates polynomials of degree 2n-1 exactly") {
  const auto rule = gauss_legendre(8);
  double sum = 0.0;
  for (std::size_t k = 0; k < 8; ++k) sum += rule.weights[k] * std::pow(rule.nodes[k], 14);
  CHECK(sum == doctest::Approx(2.0 / 15.0).epsilon(1e-13));
}

TEST_CASE("Gauss-Jacobi weights sum to the Beta moment") {
  // int_{-1}^1 (1-x)^a (1+x)^b dx = 2^{a+b+1} B(a+1, b+1)
  for (auto [a, b] : {std::pair{-0.4, -0.4}, std::pair{0.3, -0.8}, std::pair{-0.2, -0.6}}) {
    const auto rule = gauss_jacobi(32, a, b);
    double w = 0.0;
    for (double x : rule.weights) w += x;
    const double exact = std::pow(2.0, a + b + 1) * std::tgamma(a + 1) * std::tgamma(b + 1) /
                         std::tgamma(a + b + 2);
    CHECK(w == doctest::Approx(exact).epsilon(1e-12));
    for (double x : rule.nodes) {
      CHECK(x > -1.0);
      CHECK(x < 1.0);
    }
  }
}

TEST_CASE("jacobi_integral reproduces Beta integrals on [0, t]") {
  // int_0^t s^{-0.3} (t-s)^{-0.2} s ds = t^{1.5} B(1.7, 0.8)
  const double a = -0.2, b = -0.3, t = 0.7;
  const auto rule = gauss_jacobi(16, a, b);
  const double got = jacobi_integral(rule, a, b, t, [](double s) { return s; });
  const double exact = std::pow(t, 1.5) * std::beta(1.7, 0.8);
  CHECK(got == doctest::Approx(exact).epsilon(1e-12));
}

TEST_CASE("invalid exponents are rejected") {
  CHECK_THROWS_AS(gauss_jacobi(4, -1.0, 0.0), mdrift::DomainError);
  CHECK_THROWS_AS(gauss_jacobi(0, 0.0, 0.0), mdrift::DomainError);
}

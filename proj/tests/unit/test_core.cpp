#include <doctest.h>

#include <cmath>
#include <numeric>

#include "mdrift/core.hpp"

using namespace mdrift;

TEST_CASE("time grid nodes and estimation start") {
  const TimeGrid g(2.0, 4);
  CHECK(g.step() == doctest::Approx(0.5));
  CHECK(g[3] == doctest::Approx(1.5));
  CHECK(g.first_index() == 0);
  CHECK(g.times().size() == 5);
  const TimeGrid s(1.0, 5000, true);
  CHECK(s.first_index() == 1);
  CHECK(s.start() == doctest::Approx(1.0 / 5000));
  CHECK_THROWS_AS(TimeGrid(0.0, 3), DomainError);
  CHECK_THROWS_AS(TimeGrid(1.0, 0), DomainError);
}

TEST_CASE("molchan bracket and density") {
  const auto qv = QuadVarModel::molchan(0.6, 1.0);
  CHECK(quad_var(qv, 0.25) == doctest::Approx(std::pow(0.25, 0.8)));
  CHECK(qv.density(0.25) == doctest::Approx(0.8 * std::pow(0.25, -0.2)));
  CHECK(*qv.hurst() == 0.6);
  CHECK_FALSE(qv.is_unit_density());
  CHECK(QuadVarModel::molchan(0.5, 1.0).is_unit_density());
  CHECK(QuadVarModel::lebesgue(3.0).is_unit_density());
  CHECK_THROWS_AS(quad_var(qv, 1.5), DomainError);
  CHECK_THROWS_AS(QuadVarModel::molchan(1.0, 1.0), DomainError);
  CHECK_THROWS_AS(QuadVarModel::molchan(0.4, 1.0), DomainError);
}

TEST_CASE("integrate_dqv against closed forms") {
  for (double h : {0.5, 0.6, 0.75, 0.9}) {
    const auto qv = QuadVarModel::molchan(h, 1.0);
    const double p = 2.0 - 2.0 * h;
    // d<M> of 1 over [a, b]
    CHECK(integrate_dqv([](double) { return 1.0; }, qv, 0.2, 0.9) ==
          doctest::Approx(std::pow(0.9, p) - std::pow(0.2, p)).epsilon(1e-12));
    // t^2 d<M> = p t^{3-2H} dt
    CHECK(integrate_dqv([](double t) { return t * t; }, qv, 0.0, 1.0) ==
          doctest::Approx(p / (p + 2.0)).epsilon(1e-10));
    // -log t d<M> = 1 / (2 - 2H)
    CHECK(integrate_dqv([](double t) { return -std::log(t); }, qv, 0.0, 1.0) ==
          doctest::Approx(1.0 / p).epsilon(1e-8));
    // t^{-0.1} d<M> = p / (p - 0.1)
    CHECK(integrate_dqv([](double t) { return std::pow(t, -0.1); }, qv, 0.0, 1.0) ==
          doctest::Approx(p / (p - 0.1)).epsilon(1e-8));
  }
}

TEST_CASE("integrals that cancel to roundoff terminate") {
  // sin(2 pi t) over a short step centred on its root at t = 1/2
  const RealFunction f = [](double t) { return std::sin(2 * M_PI * t); };
  const double a = 0.5 - 1e-4, b = 0.5 + 1e-4;
  CHECK(std::abs(integrate_dt(f, a, b)) < 1e-18);
  const double c = 0.5 - 1e-4, d = 0.5 + 3e-4;
  const double exact = (std::cos(2 * M_PI * c) - std::cos(2 * M_PI * d)) / (2 * M_PI);
  CHECK(integrate_dt(f, c, d) == doctest::Approx(exact).epsilon(1e-9));
}

TEST_CASE("tabulated density integrates its piecewise-linear interpolant") {
  const auto qv = QuadVarModel::tabulated({0.0, 0.5, 1.0}, {1.0, 2.0, 2.0});
  // <M>_t = t + t^2 on [0, 1/2], then 0.75 + 2 (t - 1/2)
  CHECK(quad_var(qv, 0.25) == doctest::Approx(0.25 + 0.0625));
  CHECK(quad_var(qv, 1.0) == doctest::Approx(1.75));
  CHECK(qv.density(0.25) == doctest::Approx(1.5));
  CHECK(integrate_dqv([](double t) { return t; }, qv, 0.0, 1.0) ==
        doctest::Approx(1.0 / 8.0 + 1.0 / 12.0 + 0.75).epsilon(1e-10));
  CHECK_THROWS_AS(QuadVarModel::tabulated({0.1, 1.0}, {1.0, 1.0}), DomainError);
  CHECK_THROWS_AS(QuadVarModel::tabulated({0.0, 1.0}, {1.0, -1.0}), DomainError);
}

TEST_CASE("integrate_dt and bounds") {
  CHECK(integrate_dt([](double t) { return std::sin(t); }, 0.0, M_PI) ==
        doctest::Approx(2.0).epsilon(1e-12));
  CHECK_THROWS_AS(integrate_dt([](double t) { return t; }, 1.0, 0.0), DomainError);
}

TEST_CASE("sample paths and ensembles validate lengths") {
  const TimeGrid g(1.0, 3);
  CHECK_NOTHROW(SamplePath(g, {0, 1, 2, 3}));
  CHECK_THROWS_AS(SamplePath(g, {0, 1, 2}), DimensionError);
  CHECK_THROWS_AS(Ensemble(g, {{0, 1, 2, 3}, {0, 1}}), DimensionError);
  CHECK_THROWS_AS(Ensemble(g, {}), DimensionError);
}

TEST_CASE("pooled increments average the per-copy increments") {
  const TimeGrid g(1.0, 3);
  const Ensemble e(g, {{0, 1, 3, 6}, {0, -1, -1, 2}, {1, 1, 1, 1}});
  const auto d = pooled_increments(e);
  REQUIRE(d.size() == 3);
  CHECK(d[0] == doctest::Approx(0.0));
  CHECK(d[1] == doctest::Approx(2.0 / 3.0));
  CHECK(d[2] == doctest::Approx(2.0));
}

TEST_CASE("pairwise sum matches exact sums") {
  std::vector<double> v(1000);
  std::iota(v.begin(), v.end(), 1.0);
  CHECK(pairwise_sum(v) == 500500.0);
  CHECK(pairwise_sum(std::span<const double>{}) == 0.0);
  std::vector<double> tenths(1 << 16, 0.1);
  CHECK(std::abs(pairwise_sum(tenths) - 6553.6) < 1e-9);
}

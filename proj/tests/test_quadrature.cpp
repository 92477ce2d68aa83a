#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "htype/quadrature.hpp"

using namespace htype;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("adaptive rule on smooth integrands") {
  auto r = integrate_adaptive([](double x) { return std::exp(x); }, 0, 1, 1e-12, 1e-15, 200);
  CHECK(r.value == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-13));
  CHECK(r.error_estimate < 1e-10);

  // x^13 is just past the embedded Gauss rule's exactness degree
  auto s = integrate_adaptive([](double x) { return std::pow(x, 13); }, 0, 2, 1e-12, 1e-15, 200);
  CHECK(s.value == doctest::Approx(std::pow(2.0, 14) / 14.0).epsilon(1e-13));
}

TEST_CASE("adaptive rule on oscillatory integrands") {
  // int_0^{10 pi} cos = 0 exactly; seeded panels resolve the oscillation
  auto r = integrate_adaptive([](double x) { return std::cos(x); }, 0, 10 * kPi, 1e-10, 1e-12,
                              2000, 16);
  CHECK(std::abs(r.value) < 1e-10);

  auto s = integrate_adaptive([](double x) { return std::cos(7 * x) * std::exp(-x); }, 0, 30,
                              1e-11, 1e-14, 2000, 32);
  CHECK(s.value == doctest::Approx(1.0 / 50.0).epsilon(1e-10));  // Re 1/(1+7i), e^{-30} tail
}

TEST_CASE("kernel-type integrand against a closed form") {
  // int_0^inf s^4 / sinh(s)^2 ds = 3 zeta(4) = pi^4 / 30; tail beyond 40 is ~ e^{-80}
  auto r = integrate_adaptive(
      [](double s) {
        if (s == 0) return 0.0;
        const double q = s * s / std::sinh(s);
        return q * q;
      },
      0, 40, 1e-12, 1e-15, 2000, 8);
  CHECK(r.value == doctest::Approx(std::pow(kPi, 4) / 30.0).epsilon(1e-12));
}

TEST_CASE("panel budget exhaustion throws with the best estimate attached") {
  auto bad = [](double x) { return 1.0 / std::sqrt(std::abs(x - 0.3141)); };
  CHECK_THROWS_AS(integrate_adaptive(bad, 0, 1, 1e-13, 1e-16, 4), QuadratureFailure);
  try {
    integrate_adaptive(bad, 0, 1, 1e-13, 1e-16, 4);
  } catch (const QuadratureFailure& e) {
    CHECK(std::isfinite(e.best_value));
    CHECK(e.estimated_error > 0);
  }
}

TEST_CASE("Gauss-Legendre nodes and exactness") {
  GaussRule g = gauss_legendre(12);
  REQUIRE(g.nodes.size() == 12);
  double wsum = 0, m22 = 0;
  for (std::size_t i = 0; i < 12; ++i) {
    wsum += g.weights[i];
    m22 += g.weights[i] * std::pow(g.nodes[i], 22);
    if (i) CHECK(g.nodes[i] > g.nodes[i - 1]);
  }
  CHECK(wsum == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(m22 == doctest::Approx(2.0 / 23.0).epsilon(1e-13));  // degree 2*12-1 = 23 exactness

  GaussRule h = gauss_legendre(6, 1.0, 3.0);
  double cubic = 0;
  for (std::size_t i = 0; i < 6; ++i) cubic += h.weights[i] * std::pow(h.nodes[i], 3);
  CHECK(cubic == doctest::Approx(20.0).epsilon(1e-14));
}

TEST_CASE("sphere areas") {
  CHECK(sphere_area(1) == doctest::Approx(2.0));
  CHECK(sphere_area(2) == doctest::Approx(2 * kPi));
  CHECK(sphere_area(3) == doctest::Approx(4 * kPi));
  CHECK(sphere_area(4) == doctest::Approx(2 * kPi * kPi));
}

TEST_CASE("sphere rules integrate monomials exactly") {
  for (int d : {1, 2, 3, 4}) {
    for (int deg : {3, 5, 7, 9}) {
      auto rule = sphere_rule(d, deg);
      const double area = sphere_area(d);
      double w = 0, x2 = 0, x4 = 0, x22 = 0, odd = 0, x8 = 0;
      for (const auto& nd : rule) {
        w += nd.weight;
        x2 += nd.weight * nd.omega[0] * nd.omega[0];
        x4 += nd.weight * std::pow(nd.omega[0], 4);
        odd += nd.weight * std::pow(nd.omega[0], 3);
        if (d > 1) {
          x22 += nd.weight * nd.omega[0] * nd.omega[0] * nd.omega[1] * nd.omega[1];
          odd += nd.weight * nd.omega[0] * nd.omega[1] * nd.omega[1];
        }
        x8 += nd.weight * std::pow(nd.omega[0], 8);
      }
      CAPTURE(d);
      CAPTURE(deg);
      CHECK(w == doctest::Approx(area).epsilon(1e-13));
      CHECK(x2 == doctest::Approx(area / d).epsilon(1e-12));
      CHECK(std::abs(odd) < 1e-13 * area);
      if (deg >= 5) {
        CHECK(x4 == doctest::Approx(3.0 * area / (d * (d + 2.0))).epsilon(1e-12));
        if (d > 1) CHECK(x22 == doctest::Approx(area / (d * (d + 2.0))).epsilon(1e-12));
      }
      if (deg == 9)
        CHECK(x8 ==
              doctest::Approx(105.0 * area / (d * (d + 2.0) * (d + 4.0) * (d + 6.0)))
                  .epsilon(1e-12));
    }
  }
}

TEST_CASE("sphere rules are antipodally symmetric") {
  for (int d : {2, 3, 4}) {
    auto rule = sphere_rule(d, 9);
    for (const auto& nd : rule) {
      bool found = false;
      for (const auto& other : rule)
        if ((other.omega + nd.omega).norm() < 1e-12) {
          found = true;
          break;
        }
      CHECK(found);
    }
  }
}

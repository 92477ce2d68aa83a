#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "htype/verification.hpp"

using namespace htype;

namespace {

Polynomial mono(const HTypeGroup& G, const std::vector<int>& e, const Rational& c) {
  return Polynomial::monomial(G, e, c);
}

}  // namespace

TEST_CASE("kernel envelope scan") {
  KernelEvaluator E(build_heisenberg(1));
  EstimateReport r = check_p1_estimate(E, 12, 8);
  CHECK(r.passing());
  CHECK(r.n_points == 96);
  CHECK(r.estimate_id == "p1-envelope");

  // the witnesses re-evaluate to the recorded extremes
  CHECK(p1_estimate_ratio(E, r.argmin[0], r.argmin[1]) ==
        doctest::Approx(r.min_ratio).epsilon(1e-9));
  CHECK(p1_estimate_ratio(E, r.argmax[0], r.argmax[1]) ==
        doctest::Approx(r.max_ratio).epsilon(1e-9));

  // nested refinement keeps the coarse extremes inside the fine range
  EstimateReport f = check_p1_estimate(E, 23, 15);
  CHECK(f.passing());
  CHECK(f.max_ratio >= r.max_ratio - 1e-15);
  CHECK(f.min_ratio <= r.min_ratio + 1e-15);
}

TEST_CASE("gradient envelope scans") {
  KernelEvaluator E(build_heisenberg(1));
  std::vector<EstimateReport> rs = check_gradient_estimates(E, 12, 8);
  REQUIRE(rs.size() == 3);
  CHECK(rs[0].estimate_id == "grad-envelope");
  CHECK(rs[1].estimate_id == "gradz-envelope");
  CHECK(rs[2].estimate_id == "gradhat-envelope");
  for (const EstimateReport& r : rs) {
    CAPTURE(r.estimate_id);
    CHECK(r.passing());
    CHECK(r.n_points == 96);
  }
  GradientEstimateRatios w = gradient_estimate_ratios(E, rs[0].argmax[0], rs[0].argmax[1]);
  CHECK(w.grad == doctest::Approx(rs[0].max_ratio).epsilon(1e-9));
}

TEST_CASE("report serialization is stable across evaluators") {
  KernelEvaluator E1(build_heisenberg(1)), E2(build_heisenberg(1));
  const std::string a = report_to_json(check_p1_estimate(E1, 10, 6)).dump();
  const std::string b = report_to_json(check_p1_estimate(E2, 10, 6)).dump();
  CHECK(a == b);
  nlohmann::json j = nlohmann::json::parse(a);
  for (const char* key :
       {"estimate_id", "grid_spec", "min_ratio", "max_ratio", "argmin", "argmax", "n_points",
        "failures"})
    CHECK(j.contains(key));
}

TEST_CASE("chart measure asymptotics scan") {
  EstimateReport r = check_A_asymptotics(build_heisenberg(1), 400);
  CHECK(r.passing());
  CHECK(r.n_points == 400);
  // pointwise witness: the ratio is smooth and r-independent
  const double mid = a_asymptotic_ratio(1, 1, std::numbers::pi);
  CHECK(std::isfinite(mid));
  CHECK(mid > 0);
  CHECK(mid >= r.min_ratio);
  CHECK(mid <= r.max_ratio);
}

TEST_CASE("geodesic integral comparison scan") {
  KernelEvaluator E(build_heisenberg(1));
  for (double q : {0.0, 2.0}) {
    EstimateReport r = check_geodesic_integral_lemma(E, q, 8, 8);
    CAPTURE(q);
    CHECK(r.passing());
    const double w = geodesic_lemma_ratio(E, r.argmin[0], r.argmin[1], q);
    CHECK(w == doctest::Approx(r.min_ratio).epsilon(1e-6));
  }
}

TEST_CASE("ball averages") {
  HTypeGroup G1 = build_heisenberg(1);
  ScalarField c3;
  c3.value = [](const Point&) { return 3.0; };
  CHECK(ball_average(G1, c3) == doctest::Approx(3.0).epsilon(1e-12));

  ScalarField x1;
  x1.value = [](const Point& g) { return g.x[0]; };
  CHECK(std::abs(ball_average(G1, x1)) < 1e-12);

  // mean of d(0,g)^2 over the unit ball is Q/(Q+2)
  auto d2_mean = [](const HTypeGroup& G, int deg) {
    ScalarField d2;
    d2.value = [&G](const Point& g) {
      const double d = cc_distance_from_identity(G, g);
      return d * d;
    };
    return ball_average(G, d2, deg);
  };
  CHECK(d2_mean(G1, 9) == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
  HTypeGroup G2 = build_heisenberg(2);
  CHECK(d2_mean(G2, 9) == doctest::Approx(3.0 / 4.0).epsilon(1e-9));
  // the average is insensitive to the angular rule past low degree
  CHECK(d2_mean(G1, 7) == doctest::Approx(d2_mean(G1, 9)).epsilon(1e-4));
}

TEST_CASE("gradient commutes with the semigroup") {
  HTypeGroup G1 = build_heisenberg(1);
  KernelEvaluator E1(G1);
  Polynomial f1 = mono(G1, {1, 0, 0}, Rational(1)) + mono(G1, {0, 1, 1}, Rational(1, 2));
  Polynomial f2 = mono(G1, {2, 0, 0}, Rational(1)) - mono(G1, {0, 0, 1}, Rational(3));
  CHECK(check_commutation(E1, f1, 0.8) < 1e-4);
  CHECK(check_commutation(E1, f2, 1.0) < 1e-4);

  HTypeGroup G2 = build_heisenberg(2);
  QuadratureConfig cfg5;
  cfg5.sphere_rule_degree = 5;
  KernelEvaluator E2(G2, cfg5);
  CHECK(check_commutation(E2, mono(G2, {1, 0, 0, 0, 0}, Rational(1)), 1.0) < 1e-4);

  HTypeGroup Gq = build_quaternionic(1);
  QuadratureConfig cfg3;
  cfg3.sphere_rule_degree = 3;
  KernelEvaluator Eq(Gq, cfg3);
  CHECK(check_commutation(Eq, mono(Gq, {1, 0, 0, 0, 0, 0, 0}, Rational(1)), 1.0) < 1e-4);
}

TEST_CASE("integration by parts against the kernel") {
  HTypeGroup G = build_heisenberg(1);
  KernelEvaluator E(G);
  const Polynomial fields[] = {
      mono(G, {1, 0, 0}, Rational(1)),
      mono(G, {1, 1, 0}, Rational(1)) + mono(G, {0, 0, 1}, Rational(1)),
      mono(G, {2, 0, 0}, Rational(1)) - mono(G, {0, 1, 0}, Rational(2)),
  };
  for (const Polynomial& f : fields) {
    ByPartsResiduals r = check_integration_by_parts(E, f);
    CHECK(r.left < 1e-4);
    CHECK(r.right < 1e-4);
  }

  // constant field: the denominator vanishes, residuals come back absolute
  ByPartsResiduals rc = check_integration_by_parts(E, mono(G, {0, 0, 0}, Rational(2)));
  CHECK(rc.left < 1e-10);
  CHECK(rc.right < 1e-10);

  HTypeGroup Gq = build_quaternionic(1);
  QuadratureConfig cfg3;
  cfg3.sphere_rule_degree = 3;
  KernelEvaluator Eq(Gq, cfg3);
  Polynomial fq = mono(Gq, {0, 1, 0, 0, 0, 0, 0}, Rational(1));
  ByPartsResiduals rq = check_integration_by_parts(Eq, fq);
  CHECK(rq.left < 1e-4);
  CHECK(rq.right < 1e-4);
}

TEST_CASE("tangential projection identity") {
  for (const HTypeGroup& G : {build_heisenberg(1), build_heisenberg(2), build_quaternionic(1)}) {
    KernelEvaluator E(G);
    CHECK(check_projection_identity(E, 1.0, 50, 99) < 1e-10);
  }
}

TEST_CASE("gradient ratio on explicit fields") {
  HTypeGroup G = build_heisenberg(1);
  KernelEvaluator E(G);

  // |grad f| constant: the inequality is saturated with ratio 1
  GradientRatioBreakdown rx = gradient_ratio_breakdown(E, mono(G, {1, 0, 0}, Rational(1)), 1.0);
  CHECK(rx.ratio == doctest::Approx(1.0).epsilon(1e-3));

  // central field: grad z1 at the origin integrates to zero by symmetry
  GradientRatioBreakdown rz = gradient_ratio_breakdown(E, mono(G, {0, 0, 1}, Rational(1)), 1.0);
  CHECK(rz.ratio < 1e-6);
  CHECK(rz.intermediate < 1e-10);
  CHECK(rz.denominator > 0);

  CHECK_THROWS_AS(gradient_ratio_breakdown(E, mono(G, {0, 0, 0}, Rational(5)), 1.0),
                  DegenerateDenominator);

  // the field x1 + z1 x2 at t = 1/3 exceeds sqrt(2): strict loss in the
  // pointwise gradient bound
  Polynomial fstar = mono(G, {1, 0, 0}, Rational(1)) + mono(G, {0, 1, 1}, Rational(1));
  const double t = 1.0 / 3.0;
  GradientRatioBreakdown fd = gradient_ratio_breakdown(E, fstar, t);
  GradientRatioBreakdown ex = gradient_ratio_exact_numerator(E, fstar, t);
  CHECK(fd.ratio > std::numbers::sqrt2 - 1e-3);
  CHECK(fd.ratio == doctest::Approx(ex.ratio).epsilon(1e-6));
  CHECK(fd.denominator == ex.denominator);

  // the ratio is dilation invariant: f o phi_a at t/a^2
  Rational a(3, 2);
  const double ta = t / (1.5 * 1.5);
  CHECK(gradient_ratio(E, fstar.dilated(a), ta) == doctest::Approx(fd.ratio).epsilon(1e-3));
}

TEST_CASE("largest ratio over the quadratic family, exact in rationals") {
  struct Expect {
    HTypeGroup G;
    Rational t, k2;
  };
  const Expect cases[] = {
      {build_heisenberg(1), Rational(1, 3), Rational(2)},
      {build_heisenberg(2), Rational(2, 9), Rational(11, 7)},
      {build_heisenberg(3), Rational(1, 6), Rational(7, 5)},
      {build_quaternionic(1), Rational(2, 9), Rational(11, 7)},
  };
  for (const Expect& e : cases) {
    OptimalConstantResult r = optimal_constant_experiment(e.G);
    CAPTURE(e.G.n());
    CAPTURE(e.G.m());
    CHECK(r.t_max == e.t);
    CHECK(r.k2_max == e.k2);
    CHECK(r.lower_bound == doctest::Approx(std::sqrt(to_double(e.k2))).epsilon(1e-12));
  }
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "htype/verification.hpp"

using namespace htype;

TEST_CASE("polynomial family construction is deterministic") {
  HTypeGroup G = build_heisenberg(1);
  TestFunctionFamily a = make_polynomial_family(G, 6, 42);
  TestFunctionFamily b = make_polynomial_family(G, 6, 42);
  REQUIRE(a.members.size() == 9);  // 6 random + 3 fixed
  REQUIRE(a.names.size() == a.members.size());
  CHECK(a.seed == 42);
  for (std::size_t i = 0; i < a.members.size(); ++i) {
    CHECK(a.names[i] == b.names[i]);
    CHECK(a.members[i] == b.members[i]);
  }
  TestFunctionFamily c = make_polynomial_family(G, 6, 43);
  bool any_differ = false;
  for (std::size_t i = 0; i < 6; ++i) any_differ = any_differ || !(a.members[i] == c.members[i]);
  CHECK(any_differ);

  for (const Polynomial& p : a.members) {
    CHECK(p.weight() >= 1);
    CHECK(p.weight() <= 4);
  }
  auto has = [&](const char* name) {
    return std::find(a.names.begin(), a.names.end(), name) != a.names.end();
  };
  CHECK(has("x1"));
  CHECK(has("z1"));
  CHECK(has("x1 + z1 x2"));
}

TEST_CASE("gradient inequality scan over a small family") {
  HTypeGroup G = build_heisenberg(1);
  KernelEvaluator E(G);
  TestFunctionFamily fam = make_polynomial_family(G, 2, 7);
  std::vector<ScanRow> rows;
  EstimateReport r = scan_gradient_inequality(E, fam, 1.0, &rows);

  CHECK(r.estimate_id == "gradient-inequality-scan");
  CHECK(r.failures.empty());
  CHECK(r.n_points == static_cast<int>(fam.members.size()));
  REQUIRE(rows.size() == fam.members.size());
  CHECK(std::isfinite(r.max_ratio));
  CHECK(r.max_ratio >= 1.0 - 1e-6);

  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].name == fam.names[i]);
    CHECK(std::isfinite(rows[i].ratio));
    CHECK(rows[i].denominator > 0);
    if (rows[i].name == "z1") CHECK(rows[i].ratio < 1e-6);
    if (rows[i].name == "x1") CHECK(rows[i].ratio == doctest::Approx(1.0).epsilon(1e-3));
  }

  // the report's extremes point into the family
  const int i_max = static_cast<int>(r.argmax[0]);
  CHECK(rows[i_max].ratio == r.max_ratio);
}

TEST_CASE("scan results serialize reproducibly") {
  HTypeGroup G = build_heisenberg(1);
  TestFunctionFamily fam = make_polynomial_family(G, 2, 7);
  auto run = [&]() {
    KernelEvaluator E(G);  // fresh evaluator, fresh caches
    std::vector<ScanRow> rows;
    EstimateReport r = scan_gradient_inequality(E, fam, 1.0, &rows);
    return scan_rows_to_json(rows).dump() + "|" + report_to_json(r).dump();
  };
  const std::string a = run(), b = run();
  CHECK(a == b);

  nlohmann::json j = nlohmann::json::parse(a.substr(0, a.find('|')));
  REQUIRE(j.is_array());
  REQUIRE(j.size() == fam.members.size());
  for (const char* key : {"name", "ratio", "numerator", "denominator", "intermediate"})
    CHECK(j[0].contains(key));
}

TEST_CASE("quadrature and exact-semigroup numerators agree") {
  HTypeGroup G = build_heisenberg(1);
  KernelEvaluator E(G);
  TestFunctionFamily fam = make_polynomial_family(G, 1, 11);
  int compared = 0;
  for (std::size_t i = 0; i < fam.members.size() && compared < 3; ++i) {
    GradientRatioBreakdown fd = gradient_ratio_breakdown(E, fam.members[i], 1.0);
    GradientRatioBreakdown ex = gradient_ratio_exact_numerator(E, fam.members[i], 1.0);
    CAPTURE(fam.names[i]);
    CHECK(fd.denominator == ex.denominator);
    CHECK(std::abs(fd.numerator - ex.numerator) <= 1e-3 * std::max(1.0, ex.numerator));
    ++compared;
  }
  CHECK(compared == 3);
}

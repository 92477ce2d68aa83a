// Acceptance harness: one line per criterion, nonzero exit iff any fail.
// Each criterion pins a library guarantee end to end, with wall-time budgets
// where responsiveness is part of the contract.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "htype/verification.hpp"

using namespace htype;

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;

std::mt19937_64 rng(20260816);

double u01() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

Vec random_direction(int dim) {
  Vec v(dim);
  double norm = 0;
  do {
    for (int i = 0; i < dim; ++i) {
      const double a = u01(), b = u01();
      v[i] = std::sqrt(-2 * std::log(a + 1e-300)) * std::cos(kTwoPi * b);
    }
    norm = v.norm();
  } while (norm < 1e-6);
  return v / norm;
}

struct Criterion {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (cond) return;
    ok = false;
    if (!detail.empty()) detail += "; ";
    detail += what;
  }
};

double fd_jacobian_det(const HTypeGroup& G, const GeodesicCoords& c) {
  const int nx = G.horizontal_dim(), nz = G.center_dim();
  const int dim = nx + nz;
  Mat jac(dim, dim);
  const double h = 1e-5;
  for (int col = 0; col < dim; ++col) {
    GeodesicCoords cp = c, cm = c;
    if (col < nx) {
      cp.u[col] += h;
      cm.u[col] -= h;
    } else {
      cp.eta[col - nx] += h;
      cm.eta[col - nx] -= h;
    }
    Point pp = phi(G, cp), pm = phi(G, cm);
    for (int row = 0; row < nx; ++row) jac(row, col) = (pp.x[row] - pm.x[row]) / (2 * h);
    for (int row = 0; row < nz; ++row)
      jac(nx + row, col) = (pp.z[row] - pm.z[row]) / (2 * h);
  }
  return jac.determinant();
}

GeodesicCoords random_coords(const HTypeGroup& G, double r, double rho) {
  GeodesicCoords c;
  c.u = r * random_direction(G.horizontal_dim());
  c.eta = rho * random_direction(G.center_dim());
  return c;
}

int region_count(const std::string& spec, const char* tag) {
  const std::size_t at = spec.find(tag);
  if (at == std::string::npos) return -1;
  return std::atoi(spec.c_str() + at + std::strlen(tag));
}

// nested doubling keeps both extremes within 10 percent
void require_stable(Criterion& c, const char* what, const EstimateReport& coarse,
                    const EstimateReport& fine) {
  c.require(coarse.passing(), std::string(what) + ": coarse scan not passing");
  c.require(fine.passing(), std::string(what) + ": fine scan not passing");
  c.require(std::abs(fine.max_ratio - coarse.max_ratio) <= 0.10 * std::abs(coarse.max_ratio),
            std::string(what) + ": max ratio moved more than 10% under refinement");
  c.require(std::abs(fine.min_ratio - coarse.min_ratio) <= 0.10 * std::abs(coarse.min_ratio),
            std::string(what) + ": min ratio moved more than 10% under refinement");
}

void require_regions(Criterion& c, const char* what, const EstimateReport& r) {
  for (const char* tag : {"R1=", "R2=", "R3="}) {
    const int cnt = region_count(r.grid_spec, tag);
    c.require(cnt > 0, std::string(what) + ": grid misses region " + tag);
  }
}

}  // namespace

int main() {
  int failures = 0;

  auto run = [&](int num, const char* label, double budget_s, auto&& body) {
    Criterion c;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      body(c);
    } catch (const std::exception& e) {
      c.require(false, std::string("unexpected exception: ") + e.what());
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (budget_s > 0)
      c.require(dt <= budget_s,
                "took " + std::to_string(dt) + "s, budget " + std::to_string(budget_s) + "s");
    std::printf("%s criterion %2d: %s (%.2fs)\n", c.ok ? "PASS" : "FAIL", num, label, dt);
    if (!c.ok) {
      std::printf("    -> %s\n", c.detail.c_str());
      ++failures;
    }
    std::fflush(stdout);
  };

  run(1, "exact constant curve over the quadratic family", 1.0, [](Criterion& c) {
    for (int n : {1, 2, 3}) {
      HTypeGroup G = build_heisenberg(n);
      for (int k = 1; k <= 20; ++k) {
        Rational t(k, 17);
        t.canonicalize();
        const Rational one(1);
        const Rational closed =
            (one + t) * (one + t) / (one - Rational(2) * t + Rational(3 * n + 2) * t * t);
        c.require(k2_ratio(G, t) == closed,
                  "k2 mismatch at n=" + std::to_string(n) + " t=" + std::to_string(k) + "/17");
      }
      Rational t_max(2, 3 * n + 3);
      t_max.canonicalize();
      Rational k_max(3 * n + 5, 3 * n + 1);
      k_max.canonicalize();
      c.require(k2_ratio(G, t_max) == k_max, "maximizer value mismatch at n=" + std::to_string(n));
      const Rational eps(1, 1000);
      c.require(k2_ratio(G, t_max - eps) < k_max && k2_ratio(G, t_max + eps) < k_max,
                "claimed maximizer is not a local max at n=" + std::to_string(n));
    }
  });

  run(2, "kernel normalization at the origin", 1.0, [](Criterion& c) {
    KernelEvaluator E(build_heisenberg(1));
    const double v = E.kernel_radial(1.0, 0.0, 0.0);
    c.require(std::abs(v - 0.0625) <= 1e-8, "p_1(0,0) = " + std::to_string(v));
  });

  run(3, "unit mass across groups", 120.0, [](Criterion& c) {
    struct Case {
      HTypeGroup G;
      const char* name;
    };
    const Case cases[] = {{build_heisenberg(1), "2n=2,m=1"},
                          {build_heisenberg(2), "2n=4,m=1"},
                          {build_quaternionic(1), "2n=4,m=3"}};
    for (const Case& k : cases) {
      KernelEvaluator E(k.G);
      const double mass = E.total_mass(1.0);
      c.require(std::abs(mass - 1.0) <= 1e-4,
                std::string(k.name) + ": mass = " + std::to_string(mass));
    }
  });

  run(4, "parabolic scaling invariance", 60.0, [](Criterion& c) {
    QuadratureConfig cfg;
    cfg.abs_tol = 1e-15;
    double sup = 0;
    for (const HTypeGroup& G : {build_heisenberg(1), build_quaternionic(1)}) {
      KernelEvaluator E(G, cfg);
      for (int trial = 0; trial < 25; ++trial) {
        const double t = 0.5 + u01();
        const double alpha = 0.6 + 1.2 * u01();
        Point g = G.point(2.0 * u01() * random_direction(G.horizontal_dim()),
                          1.5 * u01() * random_direction(G.center_dim()));
        sup = std::max(sup, E.scaling_residual(t, alpha, g));
      }
    }
    c.require(sup <= 1e-8, "sup residual = " + std::to_string(sup));
  });

  run(5, "chart measure density", 60.0, [](Criterion& c) {
    int done = 0;
    for (const HTypeGroup& G :
         {build_heisenberg(1), build_heisenberg(2), build_quaternionic(1)}) {
      const int trials = G.m() == 1 && G.n() == 1 ? 60 : 20;
      for (int trial = 0; trial < trials; ++trial, ++done) {
        const double r = 0.4 + 1.6 * u01();
        const double rho = 0.5 + 5.0 * u01();
        GeodesicCoords coords = random_coords(G, r, rho);
        const double a = jacobian_A(G, r, rho);
        const double fd = std::abs(fd_jacobian_det(G, coords));
        c.require(a > 0, "density not positive");
        c.require(std::abs(fd - a) <= 1e-6 * std::abs(a),
                  "density vs finite differences: a=" + std::to_string(a) +
                      " fd=" + std::to_string(fd));
      }
    }
    c.require(done == 100, "expected 100 comparison points");

    HTypeGroup G1 = build_heisenberg(1);
    for (double rho = 0.01; rho < kTwoPi; rho += 0.01)
      c.require(jacobian_A(G1, 0.8, rho) > 0, "density vanishes inside the open chart");
    c.require(check_A_asymptotics(G1, 800).passing(), "angular asymptotic ratio unbounded");
  });

  run(6, "geodesic chart round-trip and distance", 60.0, [](Criterion& c) {
    for (const HTypeGroup& G :
         {build_heisenberg(1), build_heisenberg(2), build_quaternionic(1)}) {
      for (double r : {0.05, 0.5, 2.0, 10.0}) {
        for (double rho : {1e-3, 0.3, 2.0, 4.5, kTwoPi - 1e-3}) {
          GeodesicCoords coords = random_coords(G, r, rho);
          Point g = phi(G, coords);
          GeodesicCoords back = phi_inverse(G, g);
          c.require((back.u - coords.u).norm() <= 1e-10 * (1 + r) &&
                        (back.eta - coords.eta).norm() <= 1e-10 * (1 + rho),
                    "round-trip drift at r=" + std::to_string(r) + " rho=" + std::to_string(rho));
          const double d = cc_distance_from_identity(G, g);
          c.require(std::abs(d - r * rho) <= 1e-10 * r * rho,
                    "distance vs |u||eta| at r=" + std::to_string(r) +
                        " rho=" + std::to_string(rho));
        }
      }
    }
    HTypeGroup G1 = build_heisenberg(1);
    for (int trial = 0; trial < 200; ++trial) {
      Vec x = (0.01 + 3 * u01()) * random_direction(2);
      Vec z = (0.01 + 3 * u01()) * random_direction(1);
      const double d = cc_distance_from_identity(G1, G1.point(x, z));
      const double gauge = x.norm() + std::sqrt(z.norm());
      c.require(d / gauge > 0.7 && d / gauge < 3.7,
                "gauge ratio " + std::to_string(d / gauge) + " outside [0.7, 3.7]");
    }
  });

  run(7, "kernel solves the heat equation", 120.0, [](Criterion& c) {
    for (const HTypeGroup& G : {build_heisenberg(1), build_quaternionic(1)}) {
      KernelEvaluator E(G);
      for (int i = 0; i < 20; ++i) {
        const double d = 0.2 + 3.8 * (i / 19.0);
        const double rho = 0.3 + 5.5 * u01();
        Point g = phi(G, random_coords(G, d / rho, rho));
        const double res = E.heat_equation_residual(1.0, g);
        c.require(res <= 1e-3, "residual " + std::to_string(res) + " at d=" + std::to_string(d));
      }
    }
  });

  run(8, "two-sided kernel and measure estimates hold on refining grids", 300.0,
      [](Criterion& c) {
        KernelEvaluator E(build_heisenberg(1));

        EstimateReport p1c = check_p1_estimate(E, 40, 16);
        EstimateReport p1f = check_p1_estimate(E, 79, 31);
        c.require(p1c.n_points >= 500, "kernel envelope grid below 500 points");
        require_regions(c, "kernel envelope", p1c);
        require_stable(c, "kernel envelope", p1c, p1f);

        std::vector<EstimateReport> gc = check_gradient_estimates(E, 40, 16);
        std::vector<EstimateReport> gf = check_gradient_estimates(E, 79, 31);
        for (std::size_t i = 0; i < gc.size(); ++i) {
          c.require(gc[i].n_points >= 500, gc[i].estimate_id + " grid below 500 points");
          require_regions(c, gc[i].estimate_id.c_str(), gc[i]);
          require_stable(c, gc[i].estimate_id.c_str(), gc[i], gf[i]);
        }

        EstimateReport ac = check_A_asymptotics(E.group(), 800);
        EstimateReport af = check_A_asymptotics(E.group(), 1599);
        c.require(ac.n_points >= 500, "angular asymptotics grid below 500 points");
        require_stable(c, "angular asymptotics", ac, af);

        for (double q : {0.0, 2.0}) {
          EstimateReport lc = check_geodesic_integral_lemma(E, q, 24, 24);
          EstimateReport lf = check_geodesic_integral_lemma(E, q, 47, 47);
          const std::string what = "geodesic integral q=" + std::to_string(static_cast<int>(q));
          c.require(lc.n_points >= 500, what + " grid below 500 points");
          require_regions(c, what.c_str(), lc);
          require_stable(c, what.c_str(), lc, lf);
        }
      });

  run(9, "semigroup calculus identities", 120.0, [](Criterion& c) {
    HTypeGroup G = build_heisenberg(1);
    KernelEvaluator E(G);
    TestFunctionFamily fam = make_polynomial_family(G, 7, 20260816);
    c.require(fam.members.size() == 10, "expected 10 test fields");
    for (std::size_t i = 0; i < fam.members.size(); ++i) {
      const double comm = check_commutation(E, fam.members[i], 1.0);
      c.require(comm <= 1e-4, fam.names[i] + ": commutation residual " + std::to_string(comm));
      ByPartsResiduals bp = check_integration_by_parts(E, fam.members[i]);
      c.require(bp.left <= 1e-4 && bp.right <= 1e-4,
                fam.names[i] + ": by-parts residuals " + std::to_string(bp.left) + ", " +
                    std::to_string(bp.right));
    }
    const double proj = check_projection_identity(E, 1.0, 50, 20260816);
    c.require(proj <= 1e-8, "projection identity residual " + std::to_string(proj));
  });

  run(10, "gradient inequality scan with exact cross-check", 300.0, [](Criterion& c) {
    HTypeGroup G = build_heisenberg(1);
    KernelEvaluator E(G);
    TestFunctionFamily fam = make_polynomial_family(G, 20, 31415);
    c.require(fam.members.size() >= 20, "family smaller than 20");

    std::vector<ScanRow> rows;
    EstimateReport r = scan_gradient_inequality(E, fam, 1.0, &rows);
    c.require(r.failures.empty(), "scan reported evaluation failures");
    c.require(std::isfinite(r.max_ratio), "scan max ratio not finite");

    // quadrature numerators against the exact polynomial semigroup
    for (std::size_t i = 0; i < rows.size(); ++i) {
      Polynomial ptf = heat_semigroup_poly(fam.members[i], Rational(1));
      double num2 = 0;
      for (int k = 0; k < G.horizontal_dim(); ++k) {
        const double comp = to_double(apply_Xi(ptf, k).evaluate_at_zero());
        num2 += comp * comp;
      }
      const double ratio_exact = std::sqrt(num2) / rows[i].denominator;
      c.require(std::abs(rows[i].ratio - ratio_exact) <= 1e-3 * std::max(1.0, ratio_exact),
                rows[i].name + ": quadrature ratio " + std::to_string(rows[i].ratio) +
                    " vs exact " + std::to_string(ratio_exact));
    }

    // the witness field with a strictly larger constant at t = 1/3
    Polynomial fstar = Polynomial::monomial(G, {1, 0, 0}, Rational(1)) +
                       Polynomial::monomial(G, {0, 1, 1}, Rational(1));
    const double ratio = gradient_ratio(E, fstar, 1.0 / 3.0);
    c.require(ratio >= std::numbers::sqrt2 - 1e-3,
              "witness ratio " + std::to_string(ratio) + " below sqrt(2)");
  });

  std::printf("%d of 10 criteria passed\n", 10 - failures);
  return failures;
}

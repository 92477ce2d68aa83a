// Compares the OpenMP convolution against the serial reference path and
// times kernel evaluation on a radial grid. The two paths must agree bitwise:
// the parallel loop only distributes sphere-direction pairs whose partial
// sums are accumulated in a fixed order.
#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>

#include "htype/heat_kernel.hpp"
#include "htype/polynomial.hpp"

using namespace htype;

namespace {

double now() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

template <class F>
double time_best_of(int reps, F&& body) {
  double best = 1e300;
  for (int i = 0; i < reps; ++i) {
    const double t0 = now();
    body();
    best = std::min(best, now() - t0);
  }
  return best;
}

}  // namespace

int main(int argc, char** argv) {
  const int n = argc > 1 ? std::atoi(argv[1]) : 2;
  const double t = argc > 2 ? std::atof(argv[2]) : 1.0;
  if (n < 1) {
    std::fprintf(stderr, "usage: bench_kernels [n >= 1] [t > 0]\n");
    return 1;
  }

  HTypeGroup G = build_heisenberg(n);
  std::printf("group 2n=%d m=%d, t=%g, omp_max_threads=%d\n", G.horizontal_dim(), G.center_dim(),
              t, omp_get_max_threads());

  QuadratureConfig par_cfg, ser_cfg;
  ser_cfg.parallel = false;
  KernelEvaluator Ep(G, par_cfg), Es(G, ser_cfg);

  // dilation-weight-4 field with analytic gradient and growth certificate
  Polynomial::MultiIndex x1(G.horizontal_dim() + 1, 0), zx(G.horizontal_dim() + 1, 0);
  x1[0] = 1;
  zx[1] = 1;
  zx[G.horizontal_dim()] = 1;
  Polynomial f = Polynomial::monomial(G, x1, Rational(1)) + Polynomial::monomial(G, zx, Rational(1));
  Polynomial f2 = f * f;
  ScalarField field = as_scalar_field(f2);
  Point g = G.point(0.3 * Vec::Ones(G.horizontal_dim()), 0.2 * Vec::Ones(G.center_dim()));

  // rule construction is shared by both paths; build it once up front
  const double t_rule = now();
  const double warm_par = Ep.convolve(field, t, g);
  const double rule_s = now() - t_rule;
  const double warm_ser = Es.convolve(field, t, g);
  const std::size_t nodes =
      Ep.chart_rule(t, Ep.solve_r_cut(*field.growth, t, cc_distance_from_identity(G, g)),
                    par_cfg.sphere_rule_degree, false)
          .radial.size();

  const double par_s = time_best_of(3, [&] { (void)Ep.convolve(field, t, g); });
  const double ser_s = time_best_of(3, [&] { (void)Es.convolve(field, t, g); });

  std::printf("chart rule: %zu radial nodes, built in %.3fs (cached afterwards)\n", nodes, rule_s);
  std::printf("convolve parallel: %8.3f ms\n", 1e3 * par_s);
  std::printf("convolve serial:   %8.3f ms\n", 1e3 * ser_s);
  std::printf("speedup: %.2fx\n", ser_s / par_s);
  std::printf("bitwise identical: %s\n", warm_par == warm_ser ? "yes" : "NO");

  const int grid = 64;
  const double grid_s = time_best_of(3, [&] {
    double sink = 0;
    for (int i = 0; i < grid; ++i)
      for (int j = 0; j < grid; ++j)
        sink += Ep.kernel_radial(t, 4.0 * i / (grid - 1.0), 2.0 * j / (grid - 1.0));
    if (sink == -1) std::printf("unreachable\n");
  });
  std::printf("kernel grid %dx%d: %.3fs (%.1f us per point)\n", grid, grid,
              grid_s, 1e6 * grid_s / (grid * grid));

  return warm_par == warm_ser ? 0 : 2;
}

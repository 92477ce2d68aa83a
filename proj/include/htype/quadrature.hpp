#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

#include "htype/group.hpp"

namespace htype {

// Adaptive subdivision hit max_subdivisions before reaching tolerance.
struct QuadratureFailure : std::runtime_error {
  QuadratureFailure(const std::string& what, double best, double err)
      : std::runtime_error(what), best_value(best), estimated_error(err) {}
  double best_value;
  double estimated_error;
};

struct IntegralResult {
  double value;
  double error_estimate;
  int panels;
};

// Adaptive 15-point Gauss-Kronrod on [a, b]; the embedded 7-point Gauss rule
// supplies the per-panel error estimate and the worst panel is split first.
// initial_panels seeds a uniform partition (oscillatory integrands want panel
// width below roughly pi/frequency). Throws QuadratureFailure when the panel
// budget is exhausted.
IntegralResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                  double rel_tol, double abs_tol, int max_subdivisions,
                                  int initial_panels = 1);

struct GaussRule {
  std::vector<double> nodes;    // in (-1, 1), ascending
  std::vector<double> weights;  // sum to 2
};

// Gauss-Legendre rule, exact for polynomials of degree <= 2n - 1.
GaussRule gauss_legendre(int n);

// Same rule mapped to [a, b].
GaussRule gauss_legendre(int n, double a, double b);

struct SphereNode {
  Vec omega;
  double weight;
};

// Surface measure of S^{d-1}: 2 pi^{d/2} / Gamma(d/2).
double sphere_area(int d);

// Quadrature on S^{d-1} in R^d. Exact for polynomials in the ambient
// coordinates of total degree <= degree; weights sum to sphere_area(d).
// The node set is antipodally symmetric, so odd monomials vanish to roundoff.
std::vector<SphereNode> sphere_rule(int d, int degree);

}  // namespace htype

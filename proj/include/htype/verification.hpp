#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "htype/heat_kernel.hpp"
#include "htype/polynomial.hpp"

namespace htype {

// gradient_ratio needs P_t(|grad f|)(0) > abs_tol.
struct DegenerateDenominator : std::runtime_error {
  explicit DegenerateDenominator(const std::string& what) : std::runtime_error(what) {}
};

// Result of a min/max ratio scan over a sampled domain. The implicit constants
// of the two-sided estimates are existential, so reports record the empirical
// range instead of comparing against target values.
struct EstimateReport {
  std::string estimate_id;
  std::string grid_spec;
  double min_ratio = 0;
  double max_ratio = 0;
  Vec argmin, argmax;  // sample coordinates attaining the extremes
  int n_points = 0;
  std::vector<std::string> failures;

  // Finite, strictly positive ratio range and no evaluation failures.
  bool passing() const;
};

nlohmann::json report_to_json(const EstimateReport& r);

// Pointwise ratios behind the grid scans; report witnesses re-evaluate
// through these. Samples are chart coordinates: d = |u||eta| (the distance of
// the sampled point) and rho = |eta|.
double p1_estimate_ratio(const KernelEvaluator& E, double d, double rho);

struct GradientEstimateRatios {
  double grad;      // |grad p_1| / ((1+d) p_1)
  double grad_z;    // |grad_z p_1| / p_1
  double grad_hat;  // |grad-hat p_1| / ((1+d) p_1)
};
GradientEstimateRatios gradient_estimate_ratios(const KernelEvaluator& E, double d, double rho);

double a_asymptotic_ratio(int n, int m, double rho);

// I(d, rho0, q) * d^2 / (p_1 A) for the geodesic integral
// I = int_1^{2pi/rho0} p_1(Phi(u, tau eta)) A(r, tau rho0) tau^q dtau.
double geodesic_lemma_ratio(const KernelEvaluator& E, double d, double rho0, double q);

// Ratio p_1 / [ (1+d^{2n-m-1})/(1+(|x|d)^{n-1/2}) e^{-d^2/4} ] over a grid
// d in [0.05, 6] x rho in (0, 2pi) touching all three chart regions.
EstimateReport check_p1_estimate(const KernelEvaluator& E, int n_d = 40, int n_rho = 16);

// Three reports over the same grid: |grad p|/((1+d)p), |grad_z p|/p and
// |grad-hat p|/((1+d)p). Also verifies pointwise
// |grad-hat p| <= |grad p| + |x||grad_z p| (failure rows otherwise).
std::vector<EstimateReport> check_gradient_estimates(const KernelEvaluator& E, int n_d = 40,
                                                     int n_rho = 16);

// A(r,rho) / (r^{2m} rho^{2(m+n)} (2pi-rho)^{2n-1}) over rho in
// (1e-4, 2pi - 1e-4); r-independent by construction.
EstimateReport check_A_asymptotics(const HTypeGroup& G, int n_rho = 800);

EstimateReport check_geodesic_integral_lemma(const KernelEvaluator& E, double q, int n_d = 24,
                                             int n_rho = 24);

// Mean of f over the unit ball {d(0,g) <= 1}; the ball volume is computed
// once per (n, m) and cached.
double ball_average(const HTypeGroup& G, const ScalarField& f, int sphere_degree = 9);

// Relative residual of grad-hat P_t f (0) = P_t (grad-hat f) (0): left side by
// finite differences of the convolution, right side by convolving each
// component of grad-hat f. Normalized by max(1, |right side|).
double check_commutation(const KernelEvaluator& E, const Polynomial& f, double t);

struct ByPartsResiduals {
  double left;   // |int (grad f) p_1 + f grad p_1 dm| / int |grad f| p_1 dm
  double right;  // same with the right-invariant gradient
};
ByPartsResiduals check_integration_by_parts(const KernelEvaluator& E, const Polynomial& f);

// max over sample points of |T(x) grad p - (grad - grad-hat) p / 2| / |grad p|
// where T(x) v = sum_j <J_j x, v> J_j x / |x|^2.
double check_projection_identity(const KernelEvaluator& E, double t, int n_points,
                                 std::uint64_t seed);

struct GradientRatioBreakdown {
  double ratio;         // numerator / denominator
  double numerator;     // |grad P_t f (0)|
  double denominator;   // P_t(|grad f|)(0)
  double intermediate;  // |int (grad - grad-hat) f p_t dm| / denominator
};

// Numerator by Richardson finite differences along s -> (s e_i, 0) through
// the convolution; denominator by convolving |grad f|.
GradientRatioBreakdown gradient_ratio_breakdown(const KernelEvaluator& E, const Polynomial& f,
                                                double t);
double gradient_ratio(const KernelEvaluator& E, const Polynomial& f, double t);

// Same denominator, but the numerator from the exact polynomial semigroup;
// cross-validates the quadrature path.
GradientRatioBreakdown gradient_ratio_exact_numerator(const KernelEvaluator& E,
                                                      const Polynomial& f, double t);

struct TestFunctionFamily {
  std::vector<std::string> names;
  std::vector<Polynomial> members;
  std::uint64_t seed = 0;
  std::string description;
};

// n_random polynomials of dilation weight <= 4 with rational coefficients in
// [-3, 3] (denominator 16), plus x1, z1 and x1 + z1 x2.
TestFunctionFamily make_polynomial_family(const HTypeGroup& G, int n_random, std::uint64_t seed);

struct ScanRow {
  std::string name;
  double ratio;
  double numerator;
  double denominator;
  double intermediate;
};

// Max gradient ratio over the family; the report's witnesses are family
// indices and `rows` (when given) receives the per-member breakdown.
EstimateReport scan_gradient_inequality(const KernelEvaluator& E, const TestFunctionFamily& family,
                                        double t, std::vector<ScanRow>* rows = nullptr);

nlohmann::json scan_rows_to_json(const std::vector<ScanRow>& rows);

struct OptimalConstantResult {
  Rational t_max;
  Rational k2_max;
  double lower_bound;  // sqrt(k2_max)
};

// Maximizes k2(t) over t > 0: numeric bracket first, then the maximizer is
// snapped to a small-denominator rational and certified by exact comparisons
// against its neighbors.
OptimalConstantResult optimal_constant_experiment(const HTypeGroup& G);

}  // namespace htype

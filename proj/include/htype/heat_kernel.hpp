#pragma once

#include "htype/geometry.hpp"
#include "htype/group.hpp"
#include "htype/quadrature.hpp"

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <vector>

namespace htype {

// convolve needs a subgaussian growth certificate (or an explicit cutoff) to
// bound its integration domain.
struct MissingGrowthCertificate : std::invalid_argument {
  explicit MissingGrowthCertificate(const std::string& what) : std::invalid_argument(what) {}
};

struct QuadratureConfig {
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;     // absolute tolerance on returned kernel values
  double lambda_cutoff = 0;   // 0 = automatic: tail bound below the tolerance
  int max_subdivisions = 4000;
  int sphere_rule_degree = 9;  // polynomial exactness on S^{2n-1} and S^{m-1}
  int conv_radial_order = 12;  // Gauss order per panel in the chart quadrature
  int conv_rho_panels = 6;
  bool parallel = true;  // OpenMP over sphere-direction pairs in convolve
};

// p_t and the radial coefficients of its gradients:
//   grad_x p_t = px * x,   grad_z p_t = pz * z/|z|.
struct RadialKernelValues {
  double p;
  double px;
  double pz;
};

struct KernelGradients {
  Vec grad;      // left-invariant horizontal gradient, length 2n
  Vec grad_z;    // central gradient, length m
  Vec grad_hat;  // right-invariant horizontal gradient, length 2n
};

// One (delta, rho) pair of the chart product rule; delta = d(0, k) and
// rho = |eta|. Node points are k = (c1 u^ + c2 J_{e^} u^, c3 e^) over unit
// directions (u^, e^).
struct ChartNodeRadial {
  double delta, rho;
  double c1, c2, c3;
  double weight;  // measure weight: A-tilde times both 1-D quadrature weights
  double r, zeta;
  double p;
  double px, pz;  // filled only when the rule is built with gradients
};

struct SpherePair {
  Vec u_hat, eta_hat;
  Vec j_u;  // J_{eta_hat} u_hat
  double weight;
};

// Product quadrature over geodesic coordinates (delta, rho) in
// (0, R_cut) x (0, 2 pi) with precomputed kernel values; shared by convolve
// and the verification integrals.
struct ChartRule {
  double t, r_cut;
  bool has_gradients;
  std::vector<ChartNodeRadial> radial;
  std::vector<SpherePair> pairs;

  // op(k, w, node): k the group point, w the full weight including sphere
  // weights. Serial, deterministic iteration order.
  template <class F>
  void for_each(F&& op) const {
    const int nx = static_cast<int>(pairs.empty() ? 0 : pairs.front().u_hat.size());
    const int nz = static_cast<int>(pairs.empty() ? 0 : pairs.front().eta_hat.size());
    Point k{Vec(nx), Vec(nz)};
    for (const SpherePair& sp : pairs) {
      for (const ChartNodeRadial& nd : radial) {
        k.x.noalias() = nd.c1 * sp.u_hat;
        k.x.noalias() += nd.c2 * sp.j_u;
        k.z.noalias() = nd.c3 * sp.eta_hat;
        op(k, sp.weight * nd.weight, nd);
      }
    }
  }
};

struct MonteCarloResult {
  double value;
  double std_error;
  std::size_t n_samples;
};

// Evaluates the heat kernel of the sublaplacian from its integral
// representation
//   p_t(x, z) = (2 pi)^{-m} (4 pi)^{-n} int_{R^m}
//               e^{i<l,z> - |l| coth(t|l|) |x|^2 / 4} (|l|/sinh(t|l|))^n dl,
// reduced to a one-dimensional integral against a Hankel-type angular factor.
// Immutable and shareable between threads; the chart-rule cache is internally
// synchronized.
class KernelEvaluator {
 public:
  explicit KernelEvaluator(const HTypeGroup& G, QuadratureConfig cfg = {});

  const HTypeGroup& group() const { return group_; }
  const QuadratureConfig& config() const { return config_; }

  // p_t at |x| = r, |z| = zeta. t below 1e-6 is clamped; use the scaling law
  // for smaller times.
  double kernel_radial(double t, double r, double zeta) const;
  RadialKernelValues kernel_radial_all(double t, double r, double zeta) const;

  double kernel(double t, const Point& g) const;
  KernelGradients kernel_gradients(double t, const Point& g) const;

  // P_t f(g) = int f(g * k) p_t(k) dm(k). Requires f.growth unless r_cut_override > 0.
  double convolve(const ScalarField& f, double t, const Point& g,
                  double r_cut_override = 0) const;

  // Importance-sampling fallback for fields too rough for the product rule;
  // proposal matched to the Gaussian decay of p_t. Deterministic given seed.
  MonteCarloResult convolve_monte_carlo(const ScalarField& f, double t, const Point& g,
                                        std::size_t n_samples, std::uint64_t seed) const;

  // Total mass of p_t; integrates f = 1 with a low-degree sphere rule.
  double total_mass(double t) const;

  // |d_t p - L p| / p with central differences; L through second-order
  // stencils along the horizontal one-parameter subgroups s -> (s e_i, 0).
  double heat_equation_residual(double t, const Point& g, double h = 5e-3) const;

  // |alpha^Q p_{alpha^2 t}(phi_alpha g) / p_t(g) - 1|, Q = 2n + 2m.
  double scaling_residual(double t, double alpha, const Point& g) const;

  // Cutoff R with the tail of int |f(g*k)| p_t(k) dm below tol, from the
  // certificate envelope and the Gaussian kernel bound; rounded up for cache
  // stability.
  double solve_r_cut(const GrowthCertificate& cert, double t, double dist_g) const;

  const ChartRule& chart_rule(double t, double r_cut, int sphere_degree,
                              bool with_gradients) const;

 private:
  struct Cache;
  HTypeGroup group_;
  QuadratureConfig config_;
  std::shared_ptr<Cache> cache_;

  double convolve_with_rule(const ChartRule& rule, const ScalarField& f, const Point& g) const;
};

}  // namespace htype

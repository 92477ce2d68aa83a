#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace htype {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct DimensionMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Raised when a candidate family {J_j} fails one of the defining relations.
struct AxiomViolation : std::runtime_error {
  AxiomViolation(const std::string& which, int j_, int k_, double residual_);
  std::string axiom;
  int j;
  int k;
  double residual;
};

// A group element (x, z): horizontal part x in R^{2n}, central part z in R^m.
struct Point {
  Vec x;
  Vec z;
};

// Step-two nilpotent group determined by skew maps J_1..J_m on R^{2n} with
//   J_j^T = -J_j,   J_j^2 = -I,   J_j J_k + J_k J_j = -2 delta_{jk} I.
// The product is v * w = v + w + [v,w]/2 with bracket valued in the center.
class HTypeGroup {
 public:
  int n() const { return n_; }
  int m() const { return m_; }
  int horizontal_dim() const { return 2 * n_; }
  int center_dim() const { return m_; }
  // Exponent of the volume scaling of the dilation family.
  int homogeneous_dimension() const { return 2 * n_ + 2 * m_; }

  const Mat& J(int j) const { return j_[static_cast<std::size_t>(j)]; }
  const std::vector<Mat>& J_list() const { return j_; }

  // J_z x = sum_j z_j J_j x. Skew in x, and |J_z x| = |z||x|.
  Vec j_map(const Vec& z, const Vec& x) const;

  // [v, w]_j = <J_j x_v, x_w>, an m-vector.
  Vec bracket(const Point& v, const Point& w) const;

  Point mul(const Point& a, const Point& b) const;
  Point inv(const Point& g) const;
  Point identity() const;

  // phi_alpha(x, z) = (alpha x, alpha^2 z); a group automorphism.
  Point dilate(double alpha, const Point& g) const;

  Point point(Vec x, Vec z) const;  // dimension-checked constructor

  friend HTypeGroup build_custom(std::vector<Mat> j_maps, double tol);

 private:
  HTypeGroup(int n, int m, std::vector<Mat> j);
  void check_point(const Point& g) const;

  int n_;
  int m_;
  std::vector<Mat> j_;
};

// Heisenberg layer: m = 1, J_1 = diag of n blocks [[0,-1],[1,0]], so that
// J_1 e_1 = e_2.
HTypeGroup build_heisenberg(int n);

// Quaternionic layer: 2n = 4k, m = 3, J_j = diag blocks of left multiplication
// by i, j, k on R^4; J_1 e_1 = e_2 as in the Heisenberg case.
HTypeGroup build_quaternionic(int k);

// Validates the relations to `tol` (max-norm residuals) and constructs the
// group; throws AxiomViolation naming the failed relation otherwise.
HTypeGroup build_custom(std::vector<Mat> j_maps, double tol = 1e-10);

// Certificate |f(g)| <= M exp(a d(0,g)^{2-eps}), eps in (0,1). The same
// envelope is assumed for the gradient components (subgaussian class).
struct GrowthCertificate {
  double M;
  double a;
  double eps;
};

struct EuclideanGradient {
  Vec x;  // length 2n
  Vec z;  // length m
};

// Scalar function on the group. `gradient` may be null; consumers fall back
// to central differences with per-coordinate step 1e-6 * max(1, |coord|).
struct ScalarField {
  std::function<double(const Point&)> value;
  std::function<EuclideanGradient(const Point&)> gradient;
  std::optional<GrowthCertificate> growth;
};

// Analytic gradient when present, finite differences otherwise.
EuclideanGradient euclidean_gradient(const ScalarField& f, const Point& g);

// Left-invariant horizontal gradient: grad f = grad_x f + J_{grad_z f} x / 2.
Vec left_gradient(const HTypeGroup& G, const ScalarField& f, const Point& g);

// Right-invariant counterpart: grad_x f - J_{grad_z f} x / 2.
Vec right_gradient(const HTypeGroup& G, const ScalarField& f, const Point& g);

Vec z_gradient(const ScalarField& f, const Point& g);

}  // namespace htype

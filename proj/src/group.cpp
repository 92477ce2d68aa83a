#include "htype/group.hpp"

#include <cmath>
#include <sstream>
#include <utility>

namespace htype {

AxiomViolation::AxiomViolation(const std::string& which, int j_, int k_, double residual_)
    : std::runtime_error([&] {
        std::ostringstream os;
        os << "axiom '" << which << "' violated";
        if (j_ >= 0) os << " at j=" << j_;
        if (k_ >= 0) os << ", k=" << k_;
        os << " (residual " << residual_ << ")";
        return os.str();
      }()),
      axiom(which),
      j(j_),
      k(k_),
      residual(residual_) {}

HTypeGroup::HTypeGroup(int n, int m, std::vector<Mat> j) : n_(n), m_(m), j_(std::move(j)) {}

void HTypeGroup::check_point(const Point& g) const {
  if (g.x.size() != 2 * n_ || g.z.size() != m_)
    throw DimensionMismatch("point has wrong dimensions for this group");
}

Vec HTypeGroup::j_map(const Vec& z, const Vec& x) const {
  if (z.size() != m_ || x.size() != 2 * n_) throw DimensionMismatch("j_map argument dimensions");
  Vec out = Vec::Zero(2 * n_);
  for (int j = 0; j < m_; ++j)
    if (z[j] != 0.0) out.noalias() += z[j] * (j_[static_cast<std::size_t>(j)] * x);
  return out;
}

Vec HTypeGroup::bracket(const Point& v, const Point& w) const {
  check_point(v);
  check_point(w);
  Vec out(m_);
  for (int j = 0; j < m_; ++j) out[j] = (j_[static_cast<std::size_t>(j)] * v.x).dot(w.x);
  return out;
}

Point HTypeGroup::mul(const Point& a, const Point& b) const {
  return Point{a.x + b.x, a.z + b.z + 0.5 * bracket(a, b)};
}

Point HTypeGroup::inv(const Point& g) const {
  check_point(g);
  return Point{-g.x, -g.z};
}

Point HTypeGroup::identity() const { return Point{Vec::Zero(2 * n_), Vec::Zero(m_)}; }

Point HTypeGroup::dilate(double alpha, const Point& g) const {
  check_point(g);
  return Point{alpha * g.x, alpha * alpha * g.z};
}

Point HTypeGroup::point(Vec x, Vec z) const {
  Point g{std::move(x), std::move(z)};
  check_point(g);
  return g;
}

HTypeGroup build_heisenberg(int n) {
  if (n < 1) throw std::invalid_argument("heisenberg layer needs n >= 1");
  Mat J = Mat::Zero(2 * n, 2 * n);
  for (int b = 0; b < n; ++b) {
    J(2 * b, 2 * b + 1) = -1.0;
    J(2 * b + 1, 2 * b) = 1.0;
  }
  return build_custom({J}, 0.0);
}

HTypeGroup build_quaternionic(int k) {
  if (k < 1) throw std::invalid_argument("quaternionic layer needs k >= 1");
  // Left multiplication by i, j, k on H = R^4 with basis (1, i, j, k).
  Mat Ji = Mat::Zero(4, 4), Jj = Mat::Zero(4, 4), Jk = Mat::Zero(4, 4);
  Ji << 0, -1, 0, 0, 1, 0, 0, 0, 0, 0, 0, -1, 0, 0, 1, 0;
  Jj << 0, 0, -1, 0, 0, 0, 0, 1, 1, 0, 0, 0, 0, -1, 0, 0;
  Jk << 0, 0, 0, -1, 0, 0, -1, 0, 0, 1, 0, 0, 1, 0, 0, 0;
  std::vector<Mat> out;
  for (const Mat& B : {Ji, Jj, Jk}) {
    Mat M = Mat::Zero(4 * k, 4 * k);
    for (int b = 0; b < k; ++b) M.block(4 * b, 4 * b, 4, 4) = B;
    out.push_back(std::move(M));
  }
  return build_custom(std::move(out), 0.0);
}

HTypeGroup build_custom(std::vector<Mat> j_maps, double tol) {
  if (j_maps.empty()) throw std::invalid_argument("need at least one J map");
  const int dim = static_cast<int>(j_maps[0].rows());
  if (dim <= 0 || dim % 2 != 0)
    throw DimensionMismatch("J maps must act on an even-dimensional space");
  const int m = static_cast<int>(j_maps.size());
  const Mat I = Mat::Identity(dim, dim);
  for (int j = 0; j < m; ++j) {
    const Mat& A = j_maps[static_cast<std::size_t>(j)];
    if (A.rows() != dim || A.cols() != dim)
      throw DimensionMismatch("J maps must share one square dimension");
    double skew = (A.transpose() + A).cwiseAbs().maxCoeff();
    if (skew > tol) throw AxiomViolation("skew-symmetry", j, -1, skew);
    for (int k = j; k < m; ++k) {
      const Mat& B = j_maps[static_cast<std::size_t>(k)];
      Mat anti = A * B + B * A + 2.0 * (j == k ? 1.0 : 0.0) * I;
      double res = anti.cwiseAbs().maxCoeff();
      if (res > tol) throw AxiomViolation(j == k ? "J_j^2 = -I" : "anticommutation", j, k, res);
    }
  }
  return HTypeGroup(dim / 2, m, std::move(j_maps));
}

EuclideanGradient euclidean_gradient(const ScalarField& f, const Point& g) {
  if (f.gradient) return f.gradient(g);
  if (!f.value) throw std::invalid_argument("scalar field has no value");
  EuclideanGradient out{Vec(g.x.size()), Vec(g.z.size())};
  Point p = g;
  auto central = [&](double& slot) {
    double c = slot;
    double h = 1e-6 * std::max(1.0, std::abs(c));
    slot = c + h;
    double fp = f.value(p);
    slot = c - h;
    double fm = f.value(p);
    slot = c;
    return (fp - fm) / (2.0 * h);
  };
  for (int i = 0; i < p.x.size(); ++i) out.x[i] = central(p.x[i]);
  for (int j = 0; j < p.z.size(); ++j) out.z[j] = central(p.z[j]);
  return out;
}

Vec left_gradient(const HTypeGroup& G, const ScalarField& f, const Point& g) {
  EuclideanGradient e = euclidean_gradient(f, g);
  return e.x + 0.5 * G.j_map(e.z, g.x);
}

Vec right_gradient(const HTypeGroup& G, const ScalarField& f, const Point& g) {
  EuclideanGradient e = euclidean_gradient(f, g);
  return e.x - 0.5 * G.j_map(e.z, g.x);
}

Vec z_gradient(const ScalarField& f, const Point& g) { return euclidean_gradient(f, g).z; }

}  // namespace htype

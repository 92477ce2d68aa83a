#include "htype/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>

namespace htype {

namespace {

// 15-point Kronrod extension of 7-point Gauss-Legendre. Positive abscissae;
// even-indexed entries are the Kronrod-only nodes, odd-indexed the Gauss ones.
constexpr double kGK15Nodes[8] = {0.991455371120812639206854697526329,  //
                                  0.949107912342758524526189684047851,  //
                                  0.864864423359769072789712788640926,  //
                                  0.741531185599394439863864773280788,  //
                                  0.586087235467691130294144838258730,  //
                                  0.405845151377397166906606412076961,  //
                                  0.207784955007898467600689403773245,  //
                                  0.0};

constexpr double kKronrodWeights[8] = {0.022935322010529224963732008058970,  //
                                       0.063092092629978553290700663189204,  //
                                       0.104790010322250183839876322541518,  //
                                       0.140653259715525918745189590510238,  //
                                       0.169004726639267902826583426598550,  //
                                       0.190350578064785409913256402421014,  //
                                       0.204432940075298892414161999234649,  //
                                       0.209482141084727828012999174891714};

constexpr double kGauss7Weights[4] = {0.129484966168869693270611432679082,  //
                                      0.279705391489276667901467771423780,  //
                                      0.381830050505118944950369775488975,  //
                                      0.417959183673469387755102040816327};

struct Panel {
  double a, b, value, error;
};

struct WorstFirst {
  bool operator()(const Panel& p, const Panel& q) const { return p.error < q.error; }
};

Panel eval_gk15(const std::function<double(double)>& f, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double k15 = kKronrodWeights[7] * f(mid);
  double g7 = kGauss7Weights[3] * f(mid);
  for (int i = 0; i < 7; ++i) {
    const double dx = half * kGK15Nodes[i];
    const double fsum = f(mid - dx) + f(mid + dx);
    k15 += kKronrodWeights[i] * fsum;
    if (i % 2 == 1) g7 += kGauss7Weights[i / 2] * fsum;
  }
  return {a, b, half * k15, half * std::abs(k15 - g7)};
}

}  // namespace

IntegralResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                  double rel_tol, double abs_tol, int max_subdivisions,
                                  int initial_panels) {
  if (!(b > a)) return {0.0, 0.0, 0};
  initial_panels = std::max(1, initial_panels);
  if (initial_panels > max_subdivisions) initial_panels = std::max(1, max_subdivisions);

  std::priority_queue<Panel, std::vector<Panel>, WorstFirst> active;
  std::vector<Panel> frozen;
  double total = 0.0, total_err = 0.0;
  for (int i = 0; i < initial_panels; ++i) {
    const double pa = a + (b - a) * i / initial_panels;
    const double pb = a + (b - a) * (i + 1) / initial_panels;
    Panel p = eval_gk15(f, pa, pb);
    total += p.value;
    total_err += p.error;
    active.push(p);
  }
  int n_panels = initial_panels;

  const auto tol = [&] { return std::max(abs_tol, rel_tol * std::abs(total)); };
  while (total_err > tol() && !active.empty()) {
    if (n_panels >= max_subdivisions) {
      throw QuadratureFailure("adaptive quadrature: panel budget exhausted", total, total_err);
    }
    Panel worst = active.top();
    active.pop();
    const double width_floor = 16.0 * std::numeric_limits<double>::epsilon() *
                               std::max({std::abs(worst.a), std::abs(worst.b), 1.0});
    if (worst.b - worst.a <= width_floor) {
      // Too narrow to split; its error estimate stays in the total.
      frozen.push_back(worst);
      continue;
    }
    const double mid = 0.5 * (worst.a + worst.b);
    Panel left = eval_gk15(f, worst.a, mid);
    Panel right = eval_gk15(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    active.push(left);
    active.push(right);
    ++n_panels;
  }

  // Re-accumulate in positional order; the incremental totals drift slightly.
  std::vector<Panel> all = std::move(frozen);
  while (!active.empty()) {
    all.push_back(active.top());
    active.pop();
  }
  std::sort(all.begin(), all.end(), [](const Panel& p, const Panel& q) { return p.a < q.a; });
  double value = 0.0, err = 0.0;
  for (const Panel& p : all) {
    value += p.value;
    err += p.error;
  }
  if (err > std::max(abs_tol, rel_tol * std::abs(value)))
    throw QuadratureFailure("adaptive quadrature: tolerance unreachable", value, err);
  return {value, err, n_panels};
}

GaussRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: order must be >= 1");
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      // Legendre recurrence: (k+1) P_{k+1} = (2k+1) x P_k - k P_{k-1}.
      double p0 = 1.0, p1 = x;
      for (int k = 1; k < n; ++k) {
        const double p2 = ((2 * k + 1) * x * p1 - k * p0) / (k + 1);
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule.nodes[i] = -x;  // ascending order: most negative first
    rule.nodes[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

GaussRule gauss_legendre(int n, double a, double b) {
  GaussRule rule = gauss_legendre(n);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = mid + half * rule.nodes[i];
    rule.weights[i] *= half;
  }
  return rule;
}

double sphere_area(int d) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d);
}

std::vector<SphereNode> sphere_rule(int d, int degree) {
  if (d < 1) throw std::invalid_argument("sphere_rule: dimension must be >= 1");
  degree = std::max(degree, 1);
  std::vector<SphereNode> out;

  if (d == 1) {
    for (double s : {1.0, -1.0}) out.push_back({Vec::Constant(1, s), 1.0});
    return out;
  }
  if (d == 2) {
    int nn = degree + 1;
    if (nn % 2) ++nn;
    nn = std::max(nn, 4);
    out.reserve(nn);
    const double w = 2.0 * std::numbers::pi / nn;
    for (int i = 0; i < nn; ++i) {
      const double th = 2.0 * std::numbers::pi * i / nn;
      Vec p(2);
      p << std::cos(th), std::sin(th);
      out.push_back({p, w});
    }
    return out;
  }

  const int ng = (degree + d) / 2 + 1;
  if (d % 2 == 1) {
    // S^{d-1} even-dimensional: pole angle c = cos(phi) on [-1,1] carries
    // the polynomial weight (1-c^2)^{(d-3)/2}, paired with S^{d-2}.
    const int k = (d - 1) / 2;
    const GaussRule gl = gauss_legendre(ng, -1.0, 1.0);
    const auto sub = sphere_rule(d - 1, degree);
    out.reserve(static_cast<size_t>(ng) * sub.size());
    for (int i = 0; i < ng; ++i) {
      const double c = gl.nodes[i];
      const double s2 = 1.0 - c * c;
      double wc = gl.weights[i];
      for (int p = 0; p < k - 1; ++p) wc *= s2;
      const double sn = std::sqrt(std::max(0.0, s2));
      for (const auto& node : sub) {
        Vec pnt(d);
        pnt.head(d - 1) = sn * node.omega;
        pnt[d - 1] = c;
        out.push_back({pnt, wc * node.weight});
      }
    }
    return out;
  }

  // S^{d-1} odd-dimensional, d = 2k: split R^d = R^2 x R^{d-2}; with
  // s = sin^2(alpha) the joint weight is (1/2) s^{k-2} ds on [0,1].
  const int k = d / 2;
  const GaussRule gl = gauss_legendre(ng, 0.0, 1.0);
  const auto sub1 = sphere_rule(2, degree);
  const auto sub2 = sphere_rule(d - 2, degree);
  out.reserve(static_cast<size_t>(ng) * sub1.size() * sub2.size());
  for (int i = 0; i < ng; ++i) {
    const double s = gl.nodes[i];
    double ws = 0.5 * gl.weights[i];
    for (int p = 0; p < k - 2; ++p) ws *= s;
    const double c1 = std::sqrt(std::max(0.0, 1.0 - s));
    const double c2 = std::sqrt(std::max(0.0, s));
    for (const auto& n1 : sub1) {
      for (const auto& n2 : sub2) {
        Vec pnt(d);
        pnt.head(2) = c1 * n1.omega;
        pnt.tail(d - 2) = c2 * n2.omega;
        out.push_back({pnt, ws * n1.weight * n2.weight});
      }
    }
  }
  return out;
}

}  // namespace htype

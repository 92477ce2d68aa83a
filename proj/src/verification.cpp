#include "htype/verification.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <random>
#include <sstream>

#include "htype/geometry.hpp"

namespace htype {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Deterministic across standard libraries, unlike <random> distributions.
double u01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double gaussian(std::mt19937_64& rng) {
  double u;
  do u = u01(rng);
  while (u == 0.0);
  return std::sqrt(-2.0 * std::log(u)) * std::cos(kTwoPi * u01(rng));
}

// |x| and |z| of the point at distance d with vertical angle rho.
struct RadialPoint {
  double x_norm, zeta;
};

RadialPoint radial_from_chart(double d, double rho) {
  const double r = d / rho;
  return {r * std::sqrt(two_minus_two_cos(rho)), 0.5 * r * r * theta_minus_sin(rho)};
}

char region_tag(double d, double rho) {
  try {
    switch (region_classify(d / rho, rho)) {
      case RegionLabel::R1: return '1';
      case RegionLabel::R2: return '2';
      case RegionLabel::R3: return '3';
    }
  } catch (const InsideBall&) {
    return 'B';
  }
  return '?';
}

std::string region_counts(const std::vector<Vec>& samples) {
  int r1 = 0, r2 = 0, r3 = 0, ball = 0;
  for (const Vec& s : samples) {
    switch (region_tag(s[0], s[1])) {
      case '1': ++r1; break;
      case '2': ++r2; break;
      case '3': ++r3; break;
      case 'B': ++ball; break;
      default: break;
    }
  }
  std::ostringstream os;
  os << "regions R1=" << r1 << " R2=" << r2 << " R3=" << r3 << " B=" << ball;
  return os.str();
}

// Evaluates ratio_fn over the samples in parallel, then reduces serially in
// sample order so reports are reproducible bit for bit.
EstimateReport scan_samples(const std::string& id, const std::string& grid_spec,
                            const std::vector<Vec>& samples,
                            const std::function<double(const Vec&)>& ratio_fn, bool parallel) {
  std::vector<double> vals(samples.size(), kNaN);
  std::vector<std::string> fails(samples.size());
  const long count = static_cast<long>(samples.size());
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (long i = 0; i < count; ++i) {
    const std::size_t k = static_cast<std::size_t>(i);
    try {
      vals[k] = ratio_fn(samples[k]);
    } catch (const std::exception& e) {
      fails[k] = e.what();
    }
  }

  EstimateReport rep;
  rep.estimate_id = id;
  rep.grid_spec = grid_spec;
  rep.n_points = static_cast<int>(samples.size());
  rep.min_ratio = rep.max_ratio = kNaN;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    if (!fails[k].empty()) {
      std::ostringstream os;
      os << "sample " << k << ": " << fails[k];
      rep.failures.push_back(os.str());
      continue;
    }
    if (std::isnan(rep.min_ratio) || vals[k] < rep.min_ratio) {
      rep.min_ratio = vals[k];
      rep.argmin = samples[k];
    }
    if (std::isnan(rep.max_ratio) || vals[k] > rep.max_ratio) {
      rep.max_ratio = vals[k];
      rep.argmax = samples[k];
    }
  }
  return rep;
}

std::vector<Vec> chart_grid(double d_lo, double d_hi, int n_d, double rho_lo, double rho_hi,
                            int n_rho) {
  std::vector<Vec> samples;
  samples.reserve(static_cast<std::size_t>(n_d) * n_rho);
  for (int i = 0; i < n_d; ++i) {
    const double d = n_d == 1 ? d_lo : d_lo + (d_hi - d_lo) * i / (n_d - 1);
    for (int j = 0; j < n_rho; ++j) {
      const double rho = n_rho == 1 ? rho_lo : rho_lo + (rho_hi - rho_lo) * j / (n_rho - 1);
      Vec s(2);
      s << d, rho;
      samples.push_back(s);
    }
  }
  return samples;
}

}  // namespace

bool EstimateReport::passing() const {
  return failures.empty() && n_points > 0 && std::isfinite(min_ratio) &&
         std::isfinite(max_ratio) && min_ratio > 0 && min_ratio <= max_ratio;
}

nlohmann::json report_to_json(const EstimateReport& r) {
  nlohmann::json j;
  j["estimate_id"] = r.estimate_id;
  j["grid_spec"] = r.grid_spec;
  j["min_ratio"] = r.min_ratio;
  j["max_ratio"] = r.max_ratio;
  j["argmin"] = std::vector<double>(r.argmin.data(), r.argmin.data() + r.argmin.size());
  j["argmax"] = std::vector<double>(r.argmax.data(), r.argmax.data() + r.argmax.size());
  j["n_points"] = r.n_points;
  j["failures"] = r.failures;
  return j;
}

double p1_estimate_ratio(const KernelEvaluator& E, double d, double rho) {
  const int n = E.group().n(), m = E.group().m();
  RadialPoint rp{0.0, 0.0};
  if (d > 0) rp = radial_from_chart(d, rho);
  const double p = E.kernel_radial(1.0, rp.x_norm, rp.zeta);
  // The power term is read as vanishing at d = 0, making the envelope 1 there.
  const double power = d == 0 ? 0.0 : std::pow(d, 2 * n - m - 1);
  const double envelope =
      (1.0 + power) / (1.0 + std::pow(rp.x_norm * d, n - 0.5)) * std::exp(-0.25 * d * d);
  return p / envelope;
}

GradientEstimateRatios gradient_estimate_ratios(const KernelEvaluator& E, double d, double rho) {
  const RadialPoint rp = radial_from_chart(d, rho);
  const RadialKernelValues kv = E.kernel_radial_all(1.0, rp.x_norm, rp.zeta);
  const double grad_norm =
      std::sqrt(kv.px * kv.px + 0.25 * kv.pz * kv.pz) * rp.x_norm;
  const double denom = (1.0 + d) * kv.p;
  // For a kernel radial in (|x|, |z|) the left and right horizontal gradients
  // have equal norms; both ratios are reported per the two stated estimates.
  return {grad_norm / denom, std::abs(kv.pz) / kv.p, grad_norm / denom};
}

double a_asymptotic_ratio(int n, int m, double rho) {
  double denom = 1.0;
  for (int k = 0; k < 2 * n - 1; ++k) denom *= kTwoPi - rho;
  return jacobian_angular_scaled(n, m, rho) / denom;
}

double geodesic_lemma_ratio(const KernelEvaluator& E, double d, double rho0, double q) {
  const HTypeGroup& G = E.group();
  const double r = d / rho0;
  auto integrand = [&](double tau) {
    const double ang = tau * rho0;
    const RadialPoint rp = radial_from_chart(r * ang, ang);
    return E.kernel_radial(1.0, rp.x_norm, rp.zeta) * jacobian_A(G, r, ang) *
           std::pow(tau, q);
  };
  // The integrand decays like exp(-(d tau)^2 / 4); past tau = 1 + 24/d the
  // tail is below exp(-144) times the head and can be dropped, which keeps
  // the interval short when rho0 is small.
  const double upper = std::min(kTwoPi / rho0, 1.0 + 24.0 / d);
  const IntegralResult ir =
      integrate_adaptive(integrand, 1.0, upper, 1e-7, 1e-13, E.config().max_subdivisions, 8);
  const RadialPoint rp = radial_from_chart(d, rho0);
  const double denom = E.kernel_radial(1.0, rp.x_norm, rp.zeta) * jacobian_A(G, r, rho0);
  return ir.value * d * d / denom;
}

EstimateReport check_p1_estimate(const KernelEvaluator& E, int n_d, int n_rho) {
  const auto samples = chart_grid(0.05, 6.0, n_d, 0.05, kTwoPi - 0.05, n_rho);
  std::ostringstream spec;
  spec << "d in [0.05,6] x rho in [0.05,2pi-0.05], " << n_d << "x" << n_rho << "; "
       << region_counts(samples);
  return scan_samples(
      "p1-envelope", spec.str(), samples,
      [&](const Vec& s) { return p1_estimate_ratio(E, s[0], s[1]); }, E.config().parallel);
}

std::vector<EstimateReport> check_gradient_estimates(const KernelEvaluator& E, int n_d,
                                                     int n_rho) {
  const auto samples = chart_grid(0.05, 6.0, n_d, 0.05, kTwoPi - 0.05, n_rho);
  std::ostringstream spec;
  spec << "d in [0.05,6] x rho in [0.05,2pi-0.05], " << n_d << "x" << n_rho << "; "
       << region_counts(samples);

  struct Row {
    GradientEstimateRatios ratios;
    double combination_violation;
  };
  std::vector<Row> rows(samples.size());
  std::vector<std::string> fails(samples.size());
  const long count = static_cast<long>(samples.size());
#pragma omp parallel for schedule(dynamic) if (E.config().parallel)
  for (long i = 0; i < count; ++i) {
    const std::size_t k = static_cast<std::size_t>(i);
    try {
      const double d = samples[k][0], rho = samples[k][1];
      const RadialPoint rp = radial_from_chart(d, rho);
      const RadialKernelValues kv = E.kernel_radial_all(1.0, rp.x_norm, rp.zeta);
      const double g = std::sqrt(kv.px * kv.px + 0.25 * kv.pz * kv.pz) * rp.x_norm;
      const double denom = (1.0 + d) * kv.p;
      rows[k].ratios = {g / denom, std::abs(kv.pz) / kv.p, g / denom};
      // x and J_{z/|z|} x are orthogonal, so |grad-hat p| equals |grad p| here
      // and the combination bound has slack x |grad_z p| >= 0.
      rows[k].combination_violation = -rp.x_norm * std::abs(kv.pz) - 1e-12 * std::abs(g);
    } catch (const std::exception& e) {
      fails[k] = e.what();
    }
  }

  std::vector<EstimateReport> reports(3);
  const char* ids[3] = {"grad-envelope", "gradz-envelope", "gradhat-envelope"};
  for (int which = 0; which < 3; ++which) {
    EstimateReport& rep = reports[static_cast<std::size_t>(which)];
    rep.estimate_id = ids[which];
    rep.grid_spec = spec.str();
    rep.n_points = static_cast<int>(samples.size());
    rep.min_ratio = rep.max_ratio = kNaN;
    for (std::size_t k = 0; k < samples.size(); ++k) {
      if (!fails[k].empty()) {
        std::ostringstream os;
        os << "sample " << k << ": " << fails[k];
        rep.failures.push_back(os.str());
        continue;
      }
      const GradientEstimateRatios& g = rows[k].ratios;
      const double v = which == 0 ? g.grad : which == 1 ? g.grad_z : g.grad_hat;
      if (which == 2 && rows[k].combination_violation > 0) {
        std::ostringstream os;
        os << "sample " << k << ": combination inequality violated by "
           << rows[k].combination_violation;
        rep.failures.push_back(os.str());
      }
      if (std::isnan(rep.min_ratio) || v < rep.min_ratio) {
        rep.min_ratio = v;
        rep.argmin = samples[k];
      }
      if (std::isnan(rep.max_ratio) || v > rep.max_ratio) {
        rep.max_ratio = v;
        rep.argmax = samples[k];
      }
    }
  }
  return reports;
}

EstimateReport check_A_asymptotics(const HTypeGroup& G, int n_rho) {
  std::vector<Vec> samples;
  samples.reserve(static_cast<std::size_t>(n_rho));
  const double lo = 1e-4, hi = kTwoPi - 1e-4;
  for (int j = 0; j < n_rho; ++j) {
    Vec s(1);
    s << lo + (hi - lo) * j / (n_rho - 1);
    samples.push_back(s);
  }
  std::ostringstream spec;
  spec << "rho in [1e-4,2pi-1e-4], " << n_rho << " points";
  const int n = G.n(), m = G.m();
  return scan_samples(
      "jacobian-asymptotics", spec.str(), samples,
      [&](const Vec& s) { return a_asymptotic_ratio(n, m, s[0]); }, false);
}

EstimateReport check_geodesic_integral_lemma(const KernelEvaluator& E, double q, int n_d,
                                             int n_rho) {
  const auto samples = chart_grid(1.0, 6.0, n_d, 0.05, kTwoPi - 0.05, n_rho);
  std::ostringstream spec, id;
  spec << "d in [1,6] x rho in [0.05,2pi-0.05], " << n_d << "x" << n_rho << "; "
       << region_counts(samples);
  id << "geodesic-integral-q" << q;
  return scan_samples(
      id.str(), spec.str(), samples,
      [&](const Vec& s) { return geodesic_lemma_ratio(E, s[0], s[1], q); },
      E.config().parallel);
}

double ball_average(const HTypeGroup& G, const ScalarField& f, int sphere_degree) {
  const int n = G.n(), m = G.m();
  const int q_hom = G.homogeneous_dimension();

  struct RadialNode {
    double c1, c2, c3, w;
  };
  const GaussRule base = gauss_legendre(12);
  std::vector<RadialNode> radial;
  const int delta_panels = 4, rho_panels = 6;
  radial.reserve(static_cast<std::size_t>(delta_panels * rho_panels) * base.nodes.size() *
                 base.nodes.size());
  const double dw = 1.0 / delta_panels, rw = kTwoPi / rho_panels;
  for (int dp = 0; dp < delta_panels; ++dp)
    for (std::size_t di = 0; di < base.nodes.size(); ++di) {
      const double delta = dw * (dp + 0.5 + 0.5 * base.nodes[di]);
      const double wd = 0.5 * dw * base.weights[di];
      for (int rp = 0; rp < rho_panels; ++rp)
        for (std::size_t ri = 0; ri < base.nodes.size(); ++ri) {
          const double rho = rw * (rp + 0.5 + 0.5 * base.nodes[ri]);
          const double wr = 0.5 * rw * base.weights[ri];
          const double r = delta / rho;
          double a_tilde = jacobian_angular_scaled(n, m, rho) * wd * wr;
          for (int k = 0; k < q_hom - 1; ++k) a_tilde *= delta;
          for (int k = 0; k < m - 1; ++k) a_tilde *= rho;
          radial.push_back({0.5 * r * two_minus_two_cos(rho), r * std::sin(rho),
                            0.5 * r * r * theta_minus_sin(rho), a_tilde});
        }
    }

  static std::mutex mu;
  static std::map<std::array<int, 2>, double> volumes;
  double volume;
  {
    // Radial weights already carry the full measure, so the volume does not
    // depend on the sphere rule degree.
    std::lock_guard<std::mutex> lock(mu);
    const std::array<int, 2> key{n, m};
    auto it = volumes.find(key);
    if (it == volumes.end()) {
      double sum = 0.0;
      for (const RadialNode& nd : radial) sum += nd.w;
      volume = sum * sphere_area(2 * n) * sphere_area(m);
      volumes.emplace(key, volume);
    } else {
      volume = it->second;
    }
  }

  const auto su = sphere_rule(2 * n, sphere_degree);
  const auto sz = sphere_rule(m, sphere_degree);
  double num = 0.0;
  Vec xk(2 * n);
  Point k{Vec(2 * n), Vec(m)};
  for (const SphereNode& a : su) {
    for (const SphereNode& b : sz) {
      const Vec ju = G.j_map(b.omega, a.omega);
      const double wp = a.weight * b.weight;
      double acc = 0.0;
      for (const RadialNode& nd : radial) {
        xk.noalias() = nd.c1 * a.omega;
        xk.noalias() += nd.c2 * ju;
        k.x = xk;
        k.z.noalias() = nd.c3 * b.omega;
        acc += nd.w * f.value(k);
      }
      num += wp * acc;
    }
  }
  return num / volume;
}

double check_commutation(const KernelEvaluator& E, const Polynomial& f, double t) {
  const HTypeGroup& G = E.group();
  const int nx = G.horizontal_dim();
  const ScalarField ff = as_scalar_field(f);
  const double r_cut = E.solve_r_cut(*ff.growth, t, 1.0);
  const Vec zero_z = Vec::Zero(G.center_dim());

  auto along = [&](int i, double s) {
    Vec x = Vec::Zero(nx);
    x[i] = s;
    return E.convolve(ff, t, G.point(x, zero_z), r_cut);
  };

  Vec lhs(nx), rhs(nx);
  const double h = 1e-5;
  for (int i = 0; i < nx; ++i) {
    const double d1 = (along(i, h) - along(i, -h)) / (2.0 * h);
    const double d2 = (along(i, 0.5 * h) - along(i, -0.5 * h)) / h;
    lhs[i] = (4.0 * d2 - d1) / 3.0;
    rhs[i] = E.convolve(as_scalar_field(apply_Xi_hat(f, i)), t, G.identity(), r_cut);
  }
  return (lhs - rhs).norm() / std::max(1.0, rhs.norm());
}

ByPartsResiduals check_integration_by_parts(const KernelEvaluator& E, const Polynomial& f) {
  const HTypeGroup& G = E.group();
  const int nx = G.horizontal_dim();
  const ScalarField ff = as_scalar_field(f);
  const double r_cut = E.solve_r_cut(*ff.growth, 1.0, 0.0);
  const ChartRule& rule = E.chart_rule(1.0, r_cut, E.config().sphere_rule_degree, true);

  std::vector<Polynomial> xi, xi_hat;
  for (int i = 0; i < nx; ++i) {
    xi.push_back(apply_Xi(f, i));
    xi_hat.push_back(apply_Xi_hat(f, i));
  }

  Vec left = Vec::Zero(nx), right = Vec::Zero(nx);
  double den = 0.0;
  Vec rot(nx), gp(nx), gp_hat(nx), grad_f(nx);
  rule.for_each([&](const Point& k, double w, const ChartNodeRadial& nd) {
    rot.noalias() = G.j_map(k.z.normalized(), k.x);  // J_{z/|z|} x
    gp.noalias() = nd.px * k.x + (0.5 * nd.pz) * rot;
    gp_hat.noalias() = nd.px * k.x - (0.5 * nd.pz) * rot;
    const double fv = f.evaluate(k);
    for (int i = 0; i < nx; ++i) {
      grad_f[i] = xi[static_cast<std::size_t>(i)].evaluate(k);
      left[i] += w * (grad_f[i] * nd.p + fv * gp[i]);
      right[i] += w * (xi_hat[static_cast<std::size_t>(i)].evaluate(k) * nd.p + fv * gp_hat[i]);
    }
    den += w * grad_f.norm() * nd.p;
  });

  // Constant f: both numerators vanish by oddness; report them absolutely.
  if (den <= E.config().abs_tol) return {left.norm(), right.norm()};
  return {left.norm() / den, right.norm() / den};
}

double check_projection_identity(const KernelEvaluator& E, double t, int n_points,
                                 std::uint64_t seed) {
  const HTypeGroup& G = E.group();
  const int nx = G.horizontal_dim(), nz = G.center_dim();
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int s = 0; s < n_points; ++s) {
    Vec x(nx), z(nz);
    for (int i = 0; i < nx; ++i) x[i] = gaussian(rng);
    for (int j = 0; j < nz; ++j) z[j] = gaussian(rng);
    x *= (0.3 + 2.2 * u01(rng)) / x.norm();
    z *= (0.05 + 1.45 * u01(rng)) / z.norm();
    const Point g = G.point(x, z);
    const KernelGradients kg = E.kernel_gradients(t, g);
    Vec tangent = Vec::Zero(nx);
    for (int j = 0; j < nz; ++j) {
      const Vec jx = G.J(j) * x;
      tangent += (jx.dot(kg.grad) / x.squaredNorm()) * jx;
    }
    const Vec target = 0.5 * (kg.grad - kg.grad_hat);
    worst = std::max(worst, (tangent - target).norm() / kg.grad.norm());
  }
  return worst;
}

namespace {

// Denominator P_t(|grad f|)(0) and the intermediate |int (grad - grad-hat) f
// p_t dm| / denominator, shared by the quadrature and exact-numerator paths.
struct DenomParts {
  double denominator;
  double intermediate;
};

DenomParts denominator_parts(const KernelEvaluator& E, const Polynomial& f, double t,
                             double r_cut) {
  const HTypeGroup& G = f.group();
  const int nx = G.horizontal_dim(), nz = G.center_dim();

  auto xi = std::make_shared<std::vector<Polynomial>>();
  double m_sq = 0.0;
  double growth_a = 0.0, growth_eps = 1.0;
  for (int i = 0; i < nx; ++i) {
    xi->push_back(apply_Xi(f, i));
    const ScalarField c = as_scalar_field(xi->back());
    m_sq += c.growth->M * c.growth->M;
    growth_a = std::max(growth_a, c.growth->a);
    growth_eps = std::min(growth_eps, c.growth->eps);
  }
  ScalarField grad_norm{
      [xi, nx](const Point& g) {
        double s = 0.0;
        for (int i = 0; i < nx; ++i) {
          const double v = (*xi)[static_cast<std::size_t>(i)].evaluate(g);
          s += v * v;
        }
        return std::sqrt(s);
      },
      nullptr,
      GrowthCertificate{std::sqrt(m_sq), growth_a, growth_eps}};
  const double den = E.convolve(grad_norm, t, G.identity(), r_cut);
  if (!(den > E.config().abs_tol))
    throw DegenerateDenominator("gradient_ratio: P_t(|grad f|)(0) is at quadrature noise level");

  // (grad - grad-hat) f = J_{grad_z f} x, componentwise polynomial.
  std::vector<Polynomial> dz_list;
  for (int j = 0; j < nz; ++j) dz_list.push_back(f.partial_derivative(nx + j));
  double diff_sq = 0.0;
  for (int l = 0; l < nx; ++l) {
    Polynomial comp(G);
    for (int j = 0; j < nz; ++j) {
      const Polynomial& dz = dz_list[static_cast<std::size_t>(j)];
      if (dz.is_zero()) continue;
      Polynomial row(G);
      const Mat& J = G.J(j);
      for (int kk = 0; kk < nx; ++kk) {
        if (J(l, kk) == 0.0) continue;
        row = row + Polynomial::variable(G, kk).scaled(rational_from_double(J(l, kk)));
      }
      comp = comp + row * dz;
    }
    if (comp.is_zero()) continue;
    const double v = E.convolve(as_scalar_field(comp), t, G.identity(), r_cut);
    diff_sq += v * v;
  }
  return {den, std::sqrt(diff_sq) / den};
}

Vec fd_gradient_at_identity(const KernelEvaluator& E, const ScalarField& ff, double t,
                            double r_cut) {
  const HTypeGroup& G = E.group();
  const int nx = G.horizontal_dim();
  const Vec zero_z = Vec::Zero(G.center_dim());
  Vec grad(nx);
  const double h = 1e-5;
  for (int i = 0; i < nx; ++i) {
    auto along = [&](double s) {
      Vec x = Vec::Zero(nx);
      x[i] = s;
      return E.convolve(ff, t, G.point(x, zero_z), r_cut);
    };
    const double d1 = (along(h) - along(-h)) / (2.0 * h);
    const double d2 = (along(0.5 * h) - along(-0.5 * h)) / h;
    grad[i] = (4.0 * d2 - d1) / 3.0;
  }
  return grad;
}

GradientRatioBreakdown breakdown_impl(const KernelEvaluator& E, const Polynomial& f, double t,
                                      double r_cut, bool exact_numerator) {
  const ScalarField ff = as_scalar_field(f);
  if (!(r_cut > 0)) r_cut = E.solve_r_cut(*ff.growth, t, 1.0);
  double num;
  if (exact_numerator) {
    const Polynomial ptf = heat_semigroup_poly(f, rational_from_double(t));
    double s = 0.0;
    for (int i = 0; i < E.group().horizontal_dim(); ++i) {
      const double v = to_double(apply_Xi(ptf, i).evaluate_at_zero());
      s += v * v;
    }
    num = std::sqrt(s);
  } else {
    num = fd_gradient_at_identity(E, ff, t, r_cut).norm();
  }
  const DenomParts dp = denominator_parts(E, f, t, r_cut);
  return {num / dp.denominator, num, dp.denominator, dp.intermediate};
}

}  // namespace

GradientRatioBreakdown gradient_ratio_breakdown(const KernelEvaluator& E, const Polynomial& f,
                                                double t) {
  return breakdown_impl(E, f, t, 0.0, false);
}

double gradient_ratio(const KernelEvaluator& E, const Polynomial& f, double t) {
  return gradient_ratio_breakdown(E, f, t).ratio;
}

GradientRatioBreakdown gradient_ratio_exact_numerator(const KernelEvaluator& E,
                                                      const Polynomial& f, double t) {
  return breakdown_impl(E, f, t, 0.0, true);
}

TestFunctionFamily make_polynomial_family(const HTypeGroup& G, int n_random,
                                          std::uint64_t seed) {
  const int nx = G.horizontal_dim(), nz = G.center_dim();
  // All multi-indices of dilation weight <= 4, deterministic order, no
  // constant term.
  std::vector<std::vector<int>> indices;
  std::vector<int> idx(static_cast<std::size_t>(nx + nz), 0);
  const std::function<void(int, int)> enumerate = [&](int coord, int weight_left) {
    if (coord == nx + nz) {
      if (weight_left < 4) indices.push_back(idx);
      return;
    }
    const int unit = coord < nx ? 1 : 2;
    for (int e = 0; e * unit <= weight_left; ++e) {
      idx[static_cast<std::size_t>(coord)] = e;
      enumerate(coord + 1, weight_left - e * unit);
    }
    idx[static_cast<std::size_t>(coord)] = 0;
  };
  enumerate(0, 4);
  // Drop the constant multi-index.
  std::erase_if(indices, [](const std::vector<int>& v) {
    return std::all_of(v.begin(), v.end(), [](int e) { return e == 0; });
  });

  TestFunctionFamily fam;
  fam.seed = seed;
  fam.description =
      "random dilation-weight<=4 polynomials, rational coefficients in [-3,3], plus x1, z1, "
      "x1 + z1 x2";
  std::mt19937_64 rng(seed);
  int made = 0;
  while (made < n_random) {
    Polynomial p(G);
    for (const auto& mi : indices) {
      if (rng() % 4 != 0) continue;
      const auto c_num = static_cast<long>(rng() % 97) - 48;
      if (c_num == 0) continue;
      Rational c(c_num, 16);
      c.canonicalize();
      p = p + Polynomial::monomial(G, mi, c);
    }
    if (p.is_zero()) continue;
    ++made;
    std::ostringstream name;
    name << "random-" << (made < 10 ? "0" : "") << made;
    fam.names.push_back(name.str());
    fam.members.push_back(p);
  }
  fam.names.push_back("x1");
  fam.members.push_back(Polynomial::variable(G, 0));
  fam.names.push_back("z1");
  fam.members.push_back(Polynomial::variable(G, nx));
  fam.names.push_back("x1 + z1 x2");
  fam.members.push_back(Polynomial::variable(G, 0) +
                        Polynomial::variable(G, nx) * Polynomial::variable(G, 1));
  return fam;
}

EstimateReport scan_gradient_inequality(const KernelEvaluator& E,
                                        const TestFunctionFamily& family, double t,
                                        std::vector<ScanRow>* rows) {
  // One shared cutoff so the whole family reuses a single chart rule.
  double r_cut = 0.0;
  for (const Polynomial& f : family.members) {
    const ScalarField ff = as_scalar_field(f);
    r_cut = std::max(r_cut, E.solve_r_cut(*ff.growth, t, 1.0));
  }

  EstimateReport rep;
  rep.estimate_id = "gradient-inequality-scan";
  {
    std::ostringstream spec;
    spec << family.description << "; " << family.members.size() << " members, t=" << t
         << ", seed=" << family.seed;
    rep.grid_spec = spec.str();
  }
  rep.n_points = static_cast<int>(family.members.size());
  rep.min_ratio = rep.max_ratio = kNaN;
  if (rows) rows->clear();

  for (std::size_t k = 0; k < family.members.size(); ++k) {
    GradientRatioBreakdown b{};
    try {
      b = breakdown_impl(E, family.members[k], t, r_cut, false);
    } catch (const std::exception& e) {
      std::ostringstream os;
      os << family.names[k] << ": " << e.what();
      rep.failures.push_back(os.str());
      continue;
    }
    if (rows) rows->push_back({family.names[k], b.ratio, b.numerator, b.denominator,
                               b.intermediate});
    Vec w(1);
    w << static_cast<double>(k);
    if (std::isnan(rep.min_ratio) || b.ratio < rep.min_ratio) {
      rep.min_ratio = b.ratio;
      rep.argmin = w;
    }
    if (std::isnan(rep.max_ratio) || b.ratio > rep.max_ratio) {
      rep.max_ratio = b.ratio;
      rep.argmax = w;
    }
  }
  return rep;
}

nlohmann::json scan_rows_to_json(const std::vector<ScanRow>& rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const ScanRow& r : rows) {
    nlohmann::json j;
    j["name"] = r.name;
    j["ratio"] = r.ratio;
    j["numerator"] = r.numerator;
    j["denominator"] = r.denominator;
    j["intermediate"] = r.intermediate;
    arr.push_back(j);
  }
  return arr;
}

OptimalConstantResult optimal_constant_experiment(const HTypeGroup& G) {
  auto value = [&](const Rational& t) { return k2_ratio(G, t); };
  auto value_d = [&](double t) { return to_double(value(rational_from_double(t))); };

  // Golden-section bracket of the maximizer.
  const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = 1e-6, b = 1.5;
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double fc = value_d(c), fd = value_d(d);
  for (int it = 0; it < 120; ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = value_d(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = value_d(d);
    }
  }
  const double t_star = 0.5 * (a + b);

  // Snap to the smallest-denominator rational within 1e-6, then certify by
  // exact comparison against neighbors and a coarse exact grid.
  Rational t_best = rational_from_double(t_star);
  for (long den = 1; den <= 600; ++den) {
    const long num = std::lround(t_star * static_cast<double>(den));
    if (num <= 0) continue;
    if (std::abs(t_star - static_cast<double>(num) / static_cast<double>(den)) < 1e-6) {
      t_best = Rational(num, den);
      t_best.canonicalize();
      break;
    }
  }
  Rational k_best = value(t_best);
  for (long k = 1; k <= 300; ++k) {
    Rational tk(k, 200);
    tk.canonicalize();
    const Rational v = value(tk);
    if (v > k_best) {
      k_best = v;
      t_best = tk;
    }
  }
  const Rational eps(1, 1000000);
  if (!(value(t_best) >= value(t_best + eps)) || !(value(t_best) >= value(t_best - eps)))
    throw std::logic_error("optimal_constant_experiment: snapped maximizer fails certification");

  return {t_best, k_best, std::sqrt(to_double(k_best))};
}

}  // namespace htype

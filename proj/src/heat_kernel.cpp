#include "htype/heat_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <numeric>
#include <random>
#include <tuple>

namespace htype {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;
constexpr double kMinTime = 1e-6;

double ipow(double x, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}

// Angular average of e^{i<w e, sigma>} over sigma in S^{m-1}, times the sphere
// area: Omega_m(w) = (2 pi)^{m/2} w^{1-m/2} J_{m/2-1}(w). |Omega_m| <= area.
// Closed forms for m in {1, 3}; series below 1e-3 where the Bessel quotient
// loses digits.
double omega(int m, double w) {
  w = std::abs(w);
  if (w < 1e-3) {
    const double w2 = w * w;
    return sphere_area(m) * (1.0 - w2 / (2.0 * m) + w2 * w2 / (8.0 * m * (m + 2)));
  }
  if (m == 1) return 2.0 * std::cos(w);
  if (m == 3) return 4.0 * kPi * std::sin(w) / w;
  return std::pow(kTwoPi, 0.5 * m) * std::pow(w, 1.0 - 0.5 * m) * std::cyl_bessel_j(0.5 * m - 1.0, w);
}

// d/dw Omega_m(w) = -(2 pi)^{m/2} w^{1-m/2} J_{m/2}(w); w >= 0 here.
double omega_prime(int m, double w) {
  if (w < 1e-3) {
    const double w2 = w * w;
    return -sphere_area(m) * (w / m) * (1.0 - w2 / (2.0 * (m + 2)));
  }
  if (m == 1) return -2.0 * std::sin(w);
  if (m == 3) return 4.0 * kPi * (w * std::cos(w) - std::sin(w)) / (w * w);
  return -std::pow(kTwoPi, 0.5 * m) * std::pow(w, 1.0 - 0.5 * m) * std::cyl_bessel_j(0.5 * m, w);
}

// s coth(ts) and ln(s / sinh(ts)), kept finite through y = ts -> 0 and
// overflow-free for large y.
struct RadialFactors {
  double s_coth;
  double ln_ratio;
};

RadialFactors radial_factors(double t, double s) {
  const double y = t * s;
  if (y < 1e-4) {
    const double y2 = y * y;
    return {(1.0 + y2 / 3.0 - y2 * y2 / 45.0) / t,
            -std::log(t) - std::log1p(y2 / 6.0 * (1.0 + y2 / 20.0))};
  }
  if (y < 30.0) {
    const double sh = std::sinh(y);
    return {s * std::cosh(y) / sh, std::log(s) - std::log(sh)};
  }
  const double e2 = std::exp(-2.0 * y);
  return {s * (1.0 + 2.0 * e2 / (1.0 - e2)),
          std::log(s) - y + std::numbers::ln2 - std::log1p(-e2)};
}

// Cutoff L with int_L^inf s^p e^{-qs} ds below tol / C, where q = n t + r^2/4
// bounds the decay of the integrand and p = n + m + 1 its polynomial growth
// including the gradient insertions. Uses the geometric tail bound
// int_L^inf <= 2 L^p e^{-qL} / q, valid for L >= 2p/q.
double lambda_cutoff(int n, int m, double t, double r, double tol) {
  const double q = n * t + 0.25 * r * r;
  const int p = n + m + 1;
  tol = std::max(tol, 1e-300);
  const double c =
      std::log(sphere_area(m)) + n * std::numbers::ln2 + std::log(20.0 / (q * tol));
  double cut = std::max({2.0 * p / q, 1.0 / t, 1.0});
  for (int it = 0; it < 8; ++it)
    cut = std::max(2.0 * p / q, (c + p * std::log(cut)) / q);
  return cut;
}

double prefactor(int n, int m) { return std::pow(kTwoPi, -m) * std::pow(4.0 * kPi, -n); }

int oscillation_panels(double cut, double zeta) {
  const int by_freq = static_cast<int>(std::ceil(cut * zeta / kTwoPi)) + 1;
  return std::clamp(by_freq, 4, 1024);
}

}  // namespace

struct KernelEvaluator::Cache {
  std::mutex mu;
  std::map<std::tuple<double, double, int, int>, std::unique_ptr<ChartRule>> rules;
};

KernelEvaluator::KernelEvaluator(const HTypeGroup& G, QuadratureConfig cfg)
    : group_(G), config_(cfg), cache_(std::make_shared<Cache>()) {}

double KernelEvaluator::kernel_radial(double t, double r, double zeta) const {
  t = std::max(t, kMinTime);
  r = std::abs(r);
  zeta = std::abs(zeta);
  const int n = group_.n(), m = group_.m();
  const double cut = config_.lambda_cutoff > 0
                         ? config_.lambda_cutoff
                         : lambda_cutoff(n, m, t, r, config_.abs_tol);
  const double rr4 = 0.25 * r * r;
  auto f = [&](double s) {
    const RadialFactors rf = radial_factors(t, s);
    return ipow(s, m - 1) * omega(m, s * zeta) * std::exp(-rr4 * rf.s_coth + n * rf.ln_ratio);
  };
  const IntegralResult ir =
      integrate_adaptive(f, 0.0, cut, config_.rel_tol, config_.abs_tol,
                         config_.max_subdivisions, oscillation_panels(cut, zeta));
  return prefactor(n, m) * ir.value;
}

RadialKernelValues KernelEvaluator::kernel_radial_all(double t, double r, double zeta) const {
  t = std::max(t, kMinTime);
  r = std::abs(r);
  zeta = std::abs(zeta);
  const int n = group_.n(), m = group_.m();
  const double cut = config_.lambda_cutoff > 0
                         ? config_.lambda_cutoff
                         : lambda_cutoff(n, m, t, r, config_.abs_tol);
  const double rr4 = 0.25 * r * r;
  const int panels = oscillation_panels(cut, zeta);
  const double pref = prefactor(n, m);

  auto integrate = [&](const std::function<double(double)>& f) {
    return integrate_adaptive(f, 0.0, cut, config_.rel_tol, config_.abs_tol,
                              config_.max_subdivisions, panels)
        .value;
  };

  RadialKernelValues out{};
  out.p = pref * integrate([&](double s) {
    const RadialFactors rf = radial_factors(t, s);
    return ipow(s, m - 1) * omega(m, s * zeta) * std::exp(-rr4 * rf.s_coth + n * rf.ln_ratio);
  });
  // grad_x p = px x from differentiating e^{-s coth(ts) r^2 / 4} in r^2.
  out.px = pref * integrate([&](double s) {
    const RadialFactors rf = radial_factors(t, s);
    return ipow(s, m - 1) * omega(m, s * zeta) * (-0.5 * rf.s_coth) *
           std::exp(-rr4 * rf.s_coth + n * rf.ln_ratio);
  });
  // grad_z p = pz z/|z|; the angular factor differentiates to s Omega'_m(s zeta).
  out.pz = zeta == 0.0 ? 0.0 : pref * integrate([&](double s) {
    const RadialFactors rf = radial_factors(t, s);
    return ipow(s, m) * omega_prime(m, s * zeta) *
           std::exp(-rr4 * rf.s_coth + n * rf.ln_ratio);
  });
  return out;
}

double KernelEvaluator::kernel(double t, const Point& g) const {
  if (g.x.size() != group_.horizontal_dim() || g.z.size() != group_.center_dim())
    throw DimensionMismatch("kernel: point dimensions do not match the group");
  return kernel_radial(t, g.x.norm(), g.z.norm());
}

KernelGradients KernelEvaluator::kernel_gradients(double t, const Point& g) const {
  if (g.x.size() != group_.horizontal_dim() || g.z.size() != group_.center_dim())
    throw DimensionMismatch("kernel_gradients: point dimensions do not match the group");
  const double zeta = g.z.norm();
  const RadialKernelValues kv = kernel_radial_all(t, g.x.norm(), zeta);
  KernelGradients out;
  out.grad_z = zeta == 0.0 ? Vec(Vec::Zero(group_.center_dim())) : Vec((kv.pz / zeta) * g.z);
  const Vec gx = kv.px * g.x;
  const Vec half_rot = 0.5 * group_.j_map(out.grad_z, g.x);
  out.grad = gx + half_rot;
  out.grad_hat = gx - half_rot;
  return out;
}

const ChartRule& KernelEvaluator::chart_rule(double t, double r_cut, int sphere_degree,
                                             bool with_gradients) const {
  std::lock_guard<std::mutex> lock(cache_->mu);
  const auto key = std::make_tuple(t, r_cut, sphere_degree, with_gradients ? 1 : 0);
  auto it = cache_->rules.find(key);
  if (it != cache_->rules.end()) return *it->second;

  const int n = group_.n(), m = group_.m();
  const int q_hom = group_.homogeneous_dimension();
  auto rule = std::make_unique<ChartRule>();
  rule->t = t;
  rule->r_cut = r_cut;
  rule->has_gradients = with_gradients;

  const GaussRule base = gauss_legendre(config_.conv_radial_order);
  const int n_delta = std::clamp(
      static_cast<int>(std::ceil(r_cut / std::max(0.5, 0.5 * std::sqrt(t)))), 8, 96);
  const double dw = r_cut / n_delta;
  const double rw = kTwoPi / config_.conv_rho_panels;
  rule->radial.reserve(static_cast<std::size_t>(n_delta * config_.conv_rho_panels) *
                       base.nodes.size() * base.nodes.size());

  for (int dp = 0; dp < n_delta; ++dp) {
    for (std::size_t di = 0; di < base.nodes.size(); ++di) {
      const double delta = dw * (dp + 0.5 + 0.5 * base.nodes[di]);
      const double wd = 0.5 * dw * base.weights[di];
      for (int rp = 0; rp < config_.conv_rho_panels; ++rp) {
        for (std::size_t ri = 0; ri < base.nodes.size(); ++ri) {
          const double rho = rw * (rp + 0.5 + 0.5 * base.nodes[ri]);
          const double wr = 0.5 * rw * base.weights[ri];
          const double r = delta / rho;
          ChartNodeRadial nd{};
          nd.delta = delta;
          nd.rho = rho;
          nd.c1 = 0.5 * r * two_minus_two_cos(rho);
          nd.c2 = r * std::sin(rho);
          nd.c3 = 0.5 * r * r * theta_minus_sin(rho);
          nd.r = r * std::sqrt(two_minus_two_cos(rho));
          nd.zeta = nd.c3;
          nd.weight = ipow(delta, q_hom - 1) * ipow(rho, m - 1) *
                      jacobian_angular_scaled(n, m, rho) * wd * wr;
          rule->radial.push_back(nd);
        }
      }
    }
  }

  {
    std::exception_ptr err;
    const long count = static_cast<long>(rule->radial.size());
#pragma omp parallel for schedule(dynamic, 32) if (config_.parallel)
    for (long i = 0; i < count; ++i) {
      try {
        ChartNodeRadial& nd = rule->radial[static_cast<std::size_t>(i)];
        if (with_gradients) {
          const RadialKernelValues kv = kernel_radial_all(t, nd.r, nd.zeta);
          nd.p = kv.p;
          nd.px = kv.px;
          nd.pz = kv.pz;
        } else {
          nd.p = kernel_radial(t, nd.r, nd.zeta);
        }
      } catch (...) {
#pragma omp critical
        if (!err) err = std::current_exception();
      }
    }
    if (err) std::rethrow_exception(err);
  }

  const auto su = sphere_rule(2 * n, sphere_degree);
  const auto sz = sphere_rule(m, sphere_degree);
  rule->pairs.reserve(su.size() * sz.size());
  for (const SphereNode& a : su)
    for (const SphereNode& b : sz)
      rule->pairs.push_back(SpherePair{a.omega, b.omega, group_.j_map(b.omega, a.omega),
                                       a.weight * b.weight});

  ChartRule* ptr = rule.get();
  cache_->rules.emplace(key, std::move(rule));
  return *ptr;
}

double KernelEvaluator::convolve_with_rule(const ChartRule& rule, const ScalarField& f,
                                           const Point& g) const {
  const int nx = group_.horizontal_dim(), nz = group_.center_dim();
  std::vector<Vec> jg(static_cast<std::size_t>(nz));
  for (int j = 0; j < nz; ++j) jg[static_cast<std::size_t>(j)] = group_.J(j) * g.x;

  std::vector<double> partial(rule.pairs.size(), 0.0);
  std::exception_ptr err;
  const long n_pairs = static_cast<long>(rule.pairs.size());
#pragma omp parallel for schedule(static) if (config_.parallel)
  for (long pi = 0; pi < n_pairs; ++pi) {
    try {
      const SpherePair& sp = rule.pairs[static_cast<std::size_t>(pi)];
      Vec xk(nx);
      Point gk{Vec(nx), Vec(nz)};
      double acc = 0.0;
      for (const ChartNodeRadial& nd : rule.radial) {
        xk.noalias() = nd.c1 * sp.u_hat;
        xk.noalias() += nd.c2 * sp.j_u;
        gk.x.noalias() = g.x + xk;
        for (int j = 0; j < nz; ++j)
          gk.z[j] = g.z[j] + nd.c3 * sp.eta_hat[j] + 0.5 * jg[static_cast<std::size_t>(j)].dot(xk);
        acc += nd.weight * nd.p * f.value(gk);
      }
      partial[static_cast<std::size_t>(pi)] = sp.weight * acc;
    } catch (...) {
#pragma omp critical
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);
  return std::accumulate(partial.begin(), partial.end(), 0.0);
}

double KernelEvaluator::convolve(const ScalarField& f, double t, const Point& g,
                                 double r_cut_override) const {
  t = std::max(t, kMinTime);
  double r_cut = r_cut_override;
  if (!(r_cut > 0)) {
    if (!f.growth)
      throw MissingGrowthCertificate(
          "convolve: the field carries no growth certificate and no cutoff was given");
    r_cut = solve_r_cut(*f.growth, t, cc_distance_from_identity(group_, g));
  }
  const ChartRule& rule = chart_rule(t, r_cut, config_.sphere_rule_degree, false);
  return convolve_with_rule(rule, f, g);
}

double KernelEvaluator::total_mass(double t) const {
  ScalarField one{[](const Point&) { return 1.0; }, nullptr, GrowthCertificate{1.0, 0.0, 0.5}};
  const double r_cut = solve_r_cut(*one.growth, std::max(t, kMinTime), 0.0);
  // Constants are exact on any sphere rule; keep the pair count small.
  const ChartRule& rule =
      chart_rule(std::max(t, kMinTime), r_cut, std::min(config_.sphere_rule_degree, 3), false);
  return convolve_with_rule(rule, one, group_.identity());
}

double KernelEvaluator::heat_equation_residual(double t, const Point& g, double h) const {
  t = std::max(t, kMinTime);
  const int nx = group_.horizontal_dim();
  const double p0 = kernel(t, g);
  double lap = 0.0;
  for (int i = 0; i < nx; ++i) {
    Vec step = Vec::Zero(nx);
    step[i] = h;
    const Point fwd = group_.mul(g, group_.point(step, Vec::Zero(group_.center_dim())));
    const Point bwd = group_.mul(g, group_.point(-step, Vec::Zero(group_.center_dim())));
    lap += (kernel(t, fwd) - 2.0 * p0 + kernel(t, bwd)) / (h * h);
  }
  const double ht = 0.5 * h * t;
  const double dt = (kernel(t + ht, g) - kernel(t - ht, g)) / (2.0 * ht);
  return std::abs(dt - lap) / p0;
}

double KernelEvaluator::scaling_residual(double t, double alpha, const Point& g) const {
  if (!(alpha > 0)) throw std::invalid_argument("scaling_residual: alpha must be positive");
  const double p1 = kernel(t, g);
  const double p2 = kernel(alpha * alpha * t, group_.dilate(alpha, g));
  return std::abs(std::pow(alpha, group_.homogeneous_dimension()) * p2 / p1 - 1.0);
}

double KernelEvaluator::solve_r_cut(const GrowthCertificate& cert, double t,
                                    double dist_g) const {
  t = std::max(t, kMinTime);
  const int n = group_.n(), m = group_.m();
  const int q_hom = group_.homogeneous_dimension();
  const double p = 2.0 - cert.eps;
  // |f(g k)| <= M' e^{a' d(k)^{2-eps}} from d(g k) <= d(g) + d(k).
  const double a_shift = cert.a * std::pow(1.0 + dist_g, p);
  const double base = std::log(std::max(cert.M, 1e-300)) + a_shift +
                      std::log(100.0 * sphere_area(2 * n) * sphere_area(m)) +
                      (n + m) * std::numbers::ln2 * 2.0 +
                      0.5 * q_hom * std::max(0.0, -std::log(t)) -
                      std::log(std::max(config_.abs_tol, 1e-300)) + 5.0;
  double r = std::sqrt(4.0 * t * std::max(10.0, base));
  for (int it = 0; it < 60; ++it) {
    const double budget = base + a_shift * std::pow(r, p) + q_hom * std::log1p(r / std::sqrt(t)) +
                          (q_hom - 1) * std::log1p(r);
    const double next = std::sqrt(4.0 * t * budget);
    if (!(next < 1e4))
      throw QuadratureFailure(
          "convolve cutoff: growth certificate grows too fast against the kernel decay", 0.0,
          std::numeric_limits<double>::infinity());
    r = next;
  }
  r = std::max({r, 6.0 * std::sqrt(t), 2.0});
  return std::ceil(2.0 * r) / 2.0;
}

MonteCarloResult KernelEvaluator::convolve_monte_carlo(const ScalarField& f, double t,
                                                       const Point& g, std::size_t n_samples,
                                                       std::uint64_t seed) const {
  t = std::max(t, kMinTime);
  const int n = group_.n(), m = group_.m();
  const int nx = 2 * n, q_hom = group_.homogeneous_dimension();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> uni_rho(1e-12, kTwoPi);

  const double sigma = std::sqrt(2.25 * t);
  // delta ~ sigma * chi_Q, heavier-tailed than the kernel's Gaussian decay.
  const double ln_chi_norm =
      (0.5 * q_hom - 1.0) * std::numbers::ln2 + std::lgamma(0.5 * q_hom);
  const double sphere_norms = sphere_area(nx) * sphere_area(m) * kTwoPi;

  std::vector<Vec> jg(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) jg[static_cast<std::size_t>(j)] = group_.J(j) * g.x;

  Vec u_hat(nx), eta_hat(m), xk(nx);
  Point gk{Vec(nx), Vec(m)};
  double mean = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < n_samples; ++i) {
    double s2 = 0.0;
    for (int k = 0; k < q_hom; ++k) {
      const double v = gauss(rng);
      s2 += v * v;
    }
    const double delta = sigma * std::sqrt(s2);
    const double rho = uni_rho(rng);
    do
      for (int k = 0; k < nx; ++k) u_hat[k] = gauss(rng);
    while (u_hat.norm() == 0.0);
    u_hat.normalize();
    do
      for (int k = 0; k < m; ++k) eta_hat[k] = gauss(rng);
    while (eta_hat.norm() == 0.0);
    eta_hat.normalize();

    const double r = delta / rho;
    const double c1 = 0.5 * r * two_minus_two_cos(rho);
    const double c2 = r * std::sin(rho);
    const double c3 = 0.5 * r * r * theta_minus_sin(rho);
    xk.noalias() = c1 * u_hat + c2 * group_.j_map(eta_hat, u_hat);
    gk.x.noalias() = g.x + xk;
    for (int j = 0; j < m; ++j)
      gk.z[j] = g.z[j] + c3 * eta_hat[j] + 0.5 * jg[static_cast<std::size_t>(j)].dot(xk);

    const double p = kernel_radial(t, r * std::sqrt(two_minus_two_cos(rho)), c3);
    const double a_tilde = ipow(delta, q_hom - 1) * ipow(rho, m - 1) *
                           jacobian_angular_scaled(n, m, rho);
    const double ln_pdf = (q_hom - 1) * std::log(delta / sigma) -
                          0.5 * (delta / sigma) * (delta / sigma) - ln_chi_norm -
                          std::log(sigma);
    const double w = a_tilde * p * f.value(gk) * sphere_norms / std::exp(ln_pdf);

    const double prev = mean;
    mean += (w - mean) / static_cast<double>(i + 1);
    m2 += (w - prev) * (w - mean);
  }
  const double var = n_samples > 1 ? m2 / static_cast<double>(n_samples - 1) : 0.0;
  return {mean, std::sqrt(var / static_cast<double>(n_samples)), n_samples};
}

}  // namespace htype

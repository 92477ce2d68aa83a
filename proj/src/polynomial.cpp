#include "htype/polynomial.hpp"

#include <cmath>
#include <memory>
#include <sstream>

namespace htype {

namespace {

Rational rational_pow(const Rational& base, int k) {
  Rational r = 1;
  for (int i = 0; i < k; ++i) r *= base;
  return r;
}

Rational factorial(int k) {
  mpz_class f;
  mpz_fac_ui(f.get_mpz_t(), static_cast<unsigned long>(k));
  return Rational(f);
}

}  // namespace

void Polynomial::add_term(const MultiIndex& idx, const Rational& c) {
  if (c == 0) return;
  auto [it, inserted] = terms_.emplace(idx, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

void Polynomial::require_same_group(const Polynomial& q) const {
  if (group_ != q.group_)
    throw std::invalid_argument("polynomial arithmetic requires a shared group instance");
}

Polynomial Polynomial::constant(const HTypeGroup& G, const Rational& c) {
  Polynomial p(G);
  p.add_term(MultiIndex(static_cast<size_t>(2 * G.n() + G.m()), 0), c);
  return p;
}

Polynomial Polynomial::variable(const HTypeGroup& G, int coord) {
  const int dim = 2 * G.n() + G.m();
  if (coord < 0 || coord >= dim)
    throw std::out_of_range("Polynomial::variable: coordinate index out of range");
  Polynomial p(G);
  MultiIndex idx(static_cast<size_t>(dim), 0);
  idx[static_cast<size_t>(coord)] = 1;
  p.add_term(idx, 1);
  return p;
}

Polynomial Polynomial::monomial(const HTypeGroup& G, const MultiIndex& exponents,
                                const Rational& c) {
  const size_t dim = static_cast<size_t>(2 * G.n() + G.m());
  if (exponents.size() != dim)
    throw std::invalid_argument("Polynomial::monomial: exponent vector has wrong length");
  for (int e : exponents)
    if (e < 0) throw std::invalid_argument("Polynomial::monomial: negative exponent");
  Polynomial p(G);
  p.add_term(exponents, c);
  return p;
}

int Polynomial::weight() const {
  const int nx = 2 * group_->n();
  int w = 0;
  for (const auto& [idx, c] : terms_) {
    int term_w = 0;
    for (int i = 0; i < static_cast<int>(idx.size()); ++i) term_w += (i < nx ? idx[i] : 2 * idx[i]);
    w = std::max(w, term_w);
  }
  return w;
}

Polynomial Polynomial::operator+(const Polynomial& q) const {
  require_same_group(q);
  Polynomial r = *this;
  for (const auto& [idx, c] : q.terms_) r.add_term(idx, c);
  return r;
}

Polynomial Polynomial::operator-(const Polynomial& q) const {
  require_same_group(q);
  Polynomial r = *this;
  for (const auto& [idx, c] : q.terms_) r.add_term(idx, -c);
  return r;
}

Polynomial Polynomial::operator*(const Polynomial& q) const {
  require_same_group(q);
  Polynomial r(*group_);
  MultiIndex sum;
  for (const auto& [ia, ca] : terms_) {
    for (const auto& [ib, cb] : q.terms_) {
      sum = ia;
      for (size_t k = 0; k < sum.size(); ++k) sum[k] += ib[k];
      r.add_term(sum, ca * cb);
    }
  }
  return r;
}

Polynomial Polynomial::scaled(const Rational& c) const {
  Polynomial r(*group_);
  if (c == 0) return r;
  for (const auto& [idx, coeff] : terms_) r.terms_.emplace(idx, coeff * c);
  return r;
}

Polynomial Polynomial::partial_derivative(int coord) const {
  if (coord < 0 || coord >= n_coords())
    throw std::out_of_range("partial_derivative: coordinate index out of range");
  Polynomial r(*group_);
  for (const auto& [idx, c] : terms_) {
    const int e = idx[static_cast<size_t>(coord)];
    if (e == 0) continue;
    MultiIndex down = idx;
    --down[static_cast<size_t>(coord)];
    r.add_term(down, c * e);
  }
  return r;
}

Polynomial Polynomial::dilated(const Rational& alpha) const {
  const int nx = 2 * group_->n();
  Polynomial r(*group_);
  for (const auto& [idx, c] : terms_) {
    int w = 0;
    for (int i = 0; i < static_cast<int>(idx.size()); ++i) w += (i < nx ? idx[i] : 2 * idx[i]);
    r.add_term(idx, c * rational_pow(alpha, w));
  }
  return r;
}

bool Polynomial::operator==(const Polynomial& q) const {
  return group_ == q.group_ && terms_ == q.terms_;
}

double Polynomial::evaluate(const Point& g) const {
  const int nx = 2 * group_->n();
  if (g.x.size() != nx || g.z.size() != group_->m())
    throw DimensionMismatch("Polynomial::evaluate: point dimensions do not match the group");
  double total = 0.0;
  for (const auto& [idx, c] : terms_) {
    double term = to_double(c);
    for (int i = 0; i < static_cast<int>(idx.size()); ++i) {
      const double v = (i < nx) ? g.x[i] : g.z[i - nx];
      for (int e = 0; e < idx[static_cast<size_t>(i)]; ++e) term *= v;
    }
    total += term;
  }
  return total;
}

Rational Polynomial::evaluate_at_zero() const {
  for (const auto& [idx, c] : terms_) {
    bool constant = true;
    for (int e : idx) constant = constant && (e == 0);
    if (constant) return c;
  }
  return 0;
}

namespace {

// d/ds f(g (s e_i, 0)) carries +1/2 <J_j x, e_i> d_{z_j}; the right-invariant
// curve d/ds f((s e_i, 0) g) flips the bracket, hence the sign.
Polynomial apply_xi_signed(const Polynomial& p, int i, const Rational& half) {
  const HTypeGroup& G = p.group();
  if (i < 0 || i >= 2 * G.n()) throw std::out_of_range("apply_Xi: field index out of range");
  Polynomial r = p.partial_derivative(i);
  for (int j = 0; j < G.m(); ++j) {
    const Polynomial dz = p.partial_derivative(2 * G.n() + j);
    if (dz.is_zero()) continue;
    // <J_j x, e_i> = sum_l (J_j)_{il} x^l, exact for rational J entries.
    Polynomial row(G);
    const Mat& J = G.J(j);
    for (int l = 0; l < 2 * G.n(); ++l) {
      if (J(i, l) == 0.0) continue;
      row = row + Polynomial::variable(G, l).scaled(rational_from_double(J(i, l)));
    }
    r = r + (row * dz).scaled(half);
  }
  return r;
}

}  // namespace

Polynomial apply_Xi(const Polynomial& p, int i) { return apply_xi_signed(p, i, Rational(1, 2)); }

Polynomial apply_Xi_hat(const Polynomial& p, int i) {
  return apply_xi_signed(p, i, Rational(-1, 2));
}

Polynomial sublaplacian(const Polynomial& p) {
  Polynomial r(p.group());
  for (int i = 0; i < 2 * p.group().n(); ++i) r = r + apply_Xi(apply_Xi(p, i), i);
  return r;
}

Polynomial heat_semigroup_poly(const Polynomial& p, const Rational& t) {
  const int max_terms = p.weight() / 2 + 2;
  Polynomial sum = p;
  Polynomial power = p;
  for (int k = 1; k <= max_terms; ++k) {
    power = sublaplacian(power);
    if (power.is_zero()) return sum;
    sum = sum + power.scaled(rational_pow(t, k) / factorial(k));
  }
  if (sublaplacian(power).is_zero()) return sum;
  throw NonTermination("heat_semigroup_poly: series did not terminate within the weight bound");
}

Rational k2_ratio(const HTypeGroup& G, const Rational& t) {
  if (std::abs(G.J(0)(1, 0) - 1.0) > 1e-12)
    throw std::invalid_argument("k2_ratio: group must satisfy the J_{u_1} e_1 = e_2 convention");
  const Polynomial f =
      Polynomial::variable(G, 0) + Polynomial::variable(G, 2 * G.n()) * Polynomial::variable(G, 1);
  const Polynomial ptf = heat_semigroup_poly(f, t);
  Rational num = 0;
  Polynomial grad_sq(G);
  for (int i = 0; i < 2 * G.n(); ++i) {
    const Rational gi = apply_Xi(ptf, i).evaluate_at_zero();
    num += gi * gi;
    const Polynomial xif = apply_Xi(f, i);
    grad_sq = grad_sq + xif * xif;
  }
  const Rational den = heat_semigroup_poly(grad_sq, t).evaluate_at_zero();
  if (den == 0) throw std::domain_error("k2_ratio: denominator vanishes at this t");
  return num / den;
}

std::string to_string(const Polynomial& p) {
  if (p.is_zero()) return "0";
  const int nx = 2 * p.group().n();
  std::ostringstream os;
  bool first = true;
  for (const auto& [idx, c] : p.terms()) {
    Rational mag = c;
    const bool neg = c < 0;
    if (neg) mag = -mag;
    if (first)
      os << (neg ? "-" : "");
    else
      os << (neg ? " - " : " + ");
    first = false;
    bool any_var = false;
    std::ostringstream vars;
    for (int i = 0; i < static_cast<int>(idx.size()); ++i) {
      const int e = idx[static_cast<size_t>(i)];
      if (e == 0) continue;
      if (any_var) vars << " ";
      if (i < nx)
        vars << "x" << (i + 1);
      else
        vars << "z" << (i - nx + 1);
      if (e > 1) vars << "^" << e;
      any_var = true;
    }
    if (!any_var) {
      os << to_string(mag);
    } else {
      if (mag != 1) os << to_string(mag) << " ";
      os << vars.str();
    }
  }
  return os.str();
}

ScalarField as_scalar_field(const Polynomial& p) {
  const HTypeGroup& G = p.group();
  const int nx = 2 * G.n();
  auto grads = std::make_shared<std::vector<Polynomial>>();
  for (int i = 0; i < p.n_coords(); ++i) grads->push_back(p.partial_derivative(i));

  ScalarField f;
  f.value = [p](const Point& g) { return p.evaluate(g); };
  f.gradient = [grads, nx](const Point& g) {
    EuclideanGradient e;
    e.x.resize(nx);
    e.z.resize(static_cast<int>(grads->size()) - nx);
    for (int i = 0; i < static_cast<int>(grads->size()); ++i) {
      const double v = (*grads)[static_cast<size_t>(i)].evaluate(g);
      if (i < nx)
        e.x[i] = v;
      else
        e.z[i - nx] = v;
    }
    return e;
  };
  // |x| <= d and |z| <= d^2/(4 pi) give |p| <= (sum |c|) d^w <= M e^d for
  // M = w! sum |c|, and e^d <= e^{d^{1.1}} once d >= 1.
  double coeff_sum = 0.0;
  for (const auto& [idx, c] : p.terms()) coeff_sum += std::abs(to_double(c));
  double fact = 1.0;
  for (int k = 2; k <= p.weight(); ++k) fact *= k;
  f.growth = GrowthCertificate{std::max(1.0, coeff_sum * fact), 1.0, 0.9};
  return f;
}

}  // namespace htype

#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "htype/group.hpp"
#include "htype/rational.hpp"

namespace htype {

// The terminating semigroup series needed more terms than the dilation weight
// allows; signals an implementation bug, not bad input.
struct NonTermination : std::logic_error {
  explicit NonTermination(const std::string& what) : std::logic_error(what) {}
};

// Polynomial on R^{2n+m} with exact rational coefficients. Coordinates are
// ordered x^1..x^{2n}, z^1..z^m. Immutable value type; the group reference
// must outlive the polynomial.
class Polynomial {
 public:
  using MultiIndex = std::vector<int>;
  using TermMap = std::map<MultiIndex, Rational>;

  explicit Polynomial(const HTypeGroup& G) : group_(&G) {}
  // Polynomials keep a reference to the group; a temporary would dangle.
  explicit Polynomial(HTypeGroup&&) = delete;

  static Polynomial constant(const HTypeGroup& G, const Rational& c);
  // coord in [0, 2n + m): 0-based index into (x, z).
  static Polynomial variable(const HTypeGroup& G, int coord);
  static Polynomial monomial(const HTypeGroup& G, const MultiIndex& exponents, const Rational& c);
  static Polynomial monomial(HTypeGroup&&, const MultiIndex&, const Rational&) = delete;

  const HTypeGroup& group() const { return *group_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  int n_coords() const { return 2 * group_->n() + group_->m(); }

  // Dilation weight: max over terms of deg_x + 2 deg_z (0 for the zero poly).
  int weight() const;

  Polynomial operator+(const Polynomial& q) const;
  Polynomial operator-(const Polynomial& q) const;
  Polynomial operator*(const Polynomial& q) const;
  Polynomial scaled(const Rational& c) const;
  Polynomial partial_derivative(int coord) const;
  // p composed with the dilation (x, z) -> (alpha x, alpha^2 z).
  Polynomial dilated(const Rational& alpha) const;

  bool operator==(const Polynomial& q) const;

  double evaluate(const Point& g) const;
  Rational evaluate_at_zero() const;

 private:
  const HTypeGroup* group_;
  TermMap terms_;

  void add_term(const MultiIndex& idx, const Rational& c);
  void require_same_group(const Polynomial& q) const;

  friend Polynomial apply_Xi(const Polynomial& p, int i);
};

// Left-invariant horizontal field X_i = d/dx^i + (1/2) sum_j <J_j x, e_i> d/dz^j,
// i 0-based in [0, 2n).
Polynomial apply_Xi(const Polynomial& p, int i);

// Right-invariant counterpart (bracket sign flipped).
Polynomial apply_Xi_hat(const Polynomial& p, int i);

// L = sum_i X_i^2; strictly reduces dilation weight by 2.
Polynomial sublaplacian(const Polynomial& p);

// P_t p = sum_k (t^k / k!) L^k p; terminates because L lowers the weight.
Polynomial heat_semigroup_poly(const Polynomial& p, const Rational& t);

// Exact ratio |grad P_t f(0)|^2 / P_t(|grad f|^2)(0) for f = x^1 + z^1 x^2;
// equals (1+t)^2 / (1 - 2t + (3n+2) t^2). Requires the J_{u_1} e_1 = e_2
// basis convention (both built-in families satisfy it).
Rational k2_ratio(const HTypeGroup& G, const Rational& t);

// Sorted human-readable form, e.g. "1 + 3/2 x1^2 z1 - x2".
std::string to_string(const Polynomial& p);

// Wraps the polynomial with its analytic gradient and a growth certificate
// (weight-w polynomials satisfy |p| <= M e^{d} with M = w! sum |coeffs|).
ScalarField as_scalar_field(const Polynomial& p);

}  // namespace htype

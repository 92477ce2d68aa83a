#include "htype/geometry.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace htype {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
// Upper cap on |eta|; the chart degenerates at 2*pi.
constexpr double kEtaCap = kTwoPi - 1e-9;

double ipow(double x, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}

// (theta - sin theta)/(2 - 2 cos theta); strictly increasing on (0, 2*pi),
// 0 at 0+, +infinity at 2*pi-.
double ratio_W(double theta) { return theta_minus_sin(theta) / two_minus_two_cos(theta); }

double ratio_W_deriv(double theta) {
  const double c = two_minus_two_cos(theta);
  return (0.5 * c * c - theta_minus_sin(theta) * std::sin(theta)) / (c * c);
}

}  // namespace

double two_minus_two_cos(double theta) {
  // 4 sin^2(theta/2) carries full relative precision at both endpoints.
  const double s = std::sin(0.5 * theta);
  return 4.0 * s * s;
}

double theta_minus_sin(double theta) {
  const double t2 = theta * theta;
  if (std::abs(theta) < 0.2) {
    // theta^3/6 (1 - t2/20 + t2^2/840 - t2^3/60480 + t2^4/6652800)
    double p = 1.0 + t2 * (-1.0 / 20 + t2 * (1.0 / 840 + t2 * (-1.0 / 60480 + t2 / 6652800)));
    return theta * t2 / 6.0 * p;
  }
  return theta - std::sin(theta);
}

const char* region_name(RegionLabel r) {
  switch (r) {
    case RegionLabel::R1:
      return "R1";
    case RegionLabel::R2:
      return "R2";
    case RegionLabel::R3:
      return "R3";
  }
  return "?";
}

Point phi(const HTypeGroup& G, const GeodesicCoords& c) {
  if (c.u.size() != 2 * G.n() || c.eta.size() != G.m())
    throw DimensionMismatch("phi: coordinate dimensions do not match the group");
  const double rho = c.eta.norm();
  if (!(c.u.norm() > 0.0) || !(rho > 0.0) || !(rho < kTwoPi))
    throw OutsideChart("phi: requires |u| > 0 and 0 < |eta| < 2*pi");
  const double a = 0.5 * two_minus_two_cos(rho);          // 1 - cos(rho)
  const double b = std::sin(rho) / rho;                   // sin(rho)/rho
  const double one_minus_b = theta_minus_sin(rho) / rho;  // 1 - sin(rho)/rho, stable near 0
  Point g;
  g.x = a * c.u + b * G.j_map(c.eta, c.u);
  g.z = 0.5 * c.u.squaredNorm() * one_minus_b * c.eta;
  return g;
}

double rotation_angle_from_ratio(double ratio) {
  if (!(ratio > 0.0)) throw std::domain_error("rotation_angle_from_ratio: ratio must be positive");
  if (ratio_W(kEtaCap) <= ratio) return kEtaCap;
  double lo = 0.0, hi = kEtaCap;
  while (hi - lo > 1e-14) {
    const double mid = 0.5 * (lo + hi);
    (ratio_W(mid) < ratio ? lo : hi) = mid;
  }
  double theta = 0.5 * (lo + hi);
  for (int i = 0; i < 2; ++i) {
    const double d = ratio_W_deriv(theta);
    if (!(d > 0.0)) break;
    const double next = theta - (ratio_W(theta) - ratio) / d;
    if (next > lo && next < hi) theta = next;
  }
  return theta;
}

GeodesicCoords phi_inverse(const HTypeGroup& G, const Point& g) {
  if (g.x.size() != 2 * G.n() || g.z.size() != G.m())
    throw DimensionMismatch("phi_inverse: point dimensions do not match the group");
  const double xn2 = g.x.squaredNorm();
  const double zn = g.z.norm();
  if (xn2 == 0.0 || zn == 0.0)
    throw OutsideChart("phi_inverse: x = 0 or z = 0 lies outside the chart");
  const double theta = rotation_angle_from_ratio(2.0 * zn / xn2);
  GeodesicCoords c;
  c.eta = (theta / zn) * g.z;
  // x = [(1-cos t) I + sin t J_{eta/t}] u, so with J_eta^2 = -t^2 I the inverse is
  // u = [(1-cos t) x - (sin t / t) J_eta x] / (2-2cos t).
  const double denom = two_minus_two_cos(theta);
  c.u = 0.5 * g.x - (std::sin(theta) / (theta * denom)) * G.j_map(c.eta, g.x);
  return c;
}

double cc_distance_from_identity(const HTypeGroup& G, const Point& g) {
  if (g.x.size() != 2 * G.n() || g.z.size() != G.m())
    throw DimensionMismatch("cc_distance_from_identity: point dimensions do not match the group");
  const double xn = g.x.norm();
  const double zn = g.z.norm();
  if (zn == 0.0) return xn;
  if (xn == 0.0) return 2.0 * std::sqrt(std::numbers::pi * zn);
  const GeodesicCoords c = phi_inverse(G, g);
  return c.u.norm() * c.eta.norm();
}

double cc_distance(const HTypeGroup& G, const Point& a, const Point& b) {
  return cc_distance_from_identity(G, G.mul(G.inv(a), b));
}

double jacobian_angular_scaled(int n, int m, double rho) {
  if (!(rho > 0.0) || !(rho < kTwoPi))
    throw std::domain_error("jacobian_angular_scaled: requires 0 < rho < 2*pi");
  const double r2 = rho * rho;
  // (2 - 2cos(rho) - rho sin(rho))/rho^4 = (1/12)(1 - rho^2/15 + rho^4/560 - rho^6/25200 + ...)
  double tail4;
  if (rho < 0.15) {
    tail4 = (1.0 / 12) * (1.0 + r2 * (-1.0 / 15 + r2 * (1.0 / 560 - r2 / 25200)));
  } else {
    tail4 = (two_minus_two_cos(rho) - rho * std::sin(rho)) / (r2 * r2);
  }
  const double half_gap3 = theta_minus_sin(rho) / (2.0 * rho * r2);  // (1/2 - sin/2rho)/rho^2
  const double cos2 = two_minus_two_cos(rho) / r2;
  return ipow(half_gap3, m - 1) * ipow(cos2, n - 1) * tail4;
}

double jacobian_angular(int n, int m, double rho) {
  return ipow(rho, 2 * (n + m)) * jacobian_angular_scaled(n, m, rho);
}

double jacobian_A(const HTypeGroup& G, double r, double rho) {
  if (!(r >= 0.0)) throw std::domain_error("jacobian_A: requires r >= 0");
  return ipow(r, 2 * G.m()) * jacobian_angular(G.n(), G.m(), rho);
}

RegionLabel region_classify(double r, double rho) {
  if (!(r * rho >= 1.0)) {
    std::ostringstream os;
    os << "region_classify: |u||eta| = " << r * rho << " lies inside the unit ball";
    throw InsideBall(os.str());
  }
  if (rho <= std::numbers::pi) return RegionLabel::R1;
  if (rho <= kTwoPi - 1.0 / (r * r)) return RegionLabel::R2;
  return RegionLabel::R3;
}

RegionLabel region_classify(const HTypeGroup& G, const GeodesicCoords& c) {
  if (c.u.size() != 2 * G.n() || c.eta.size() != G.m())
    throw DimensionMismatch("region_classify: coordinate dimensions do not match the group");
  return region_classify(c.u.norm(), c.eta.norm());
}

bool in_unit_ball(const HTypeGroup& G, const Point& g) {
  return cc_distance_from_identity(G, g) <= 1.0;
}

}  // namespace htype

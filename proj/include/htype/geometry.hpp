#pragma once

#include <stdexcept>

#include "htype/group.hpp"

namespace htype {

// Geodesic chart parameters: a horizontal direction u in R^{2n} with |u| > 0
// and a vertical angle eta in R^m with 0 < |eta| < 2*pi.
struct GeodesicCoords {
  Vec u;
  Vec eta;
};

// Partition of the complement of the unit ball in chart coordinates.
enum class RegionLabel { R1, R2, R3 };

const char* region_name(RegionLabel r);

// Point lies on a chart boundary (x = 0 or z = 0) where the inverse chart
// map is undefined; callers fall back to the explicit distance branches.
struct OutsideChart : std::domain_error {
  explicit OutsideChart(const std::string& what) : std::domain_error(what) {}
};

// Chart coordinates with |u||eta| < 1 asked for a region label.
struct InsideBall : std::domain_error {
  explicit InsideBall(const std::string& what) : std::domain_error(what) {}
};

// Chart map: (u, eta) -> ((1-cos|eta|)u + (sin|eta|/|eta|) J_eta u,
//                         (|u|^2/2)(1 - sin|eta|/|eta|) eta).
// Throws std::domain_error outside {|u| > 0, 0 < |eta| < 2*pi}.
Point phi(const HTypeGroup& G, const GeodesicCoords& c);

// Inverse of phi; requires x != 0 and z != 0 (throws OutsideChart otherwise).
// |eta| is capped at 2*pi - 1e-9 for points approaching the x = 0 axis.
GeodesicCoords phi_inverse(const HTypeGroup& G, const Point& g);

// Solves (theta - sin theta)/(2 - 2 cos theta) = ratio for theta in (0, 2*pi);
// the left side is strictly increasing. ratio must be positive.
double rotation_angle_from_ratio(double ratio);

// Carnot-Caratheodory distance to the identity: |u||eta| through the chart,
// with explicit branches d = |x| when z = 0 and d = 2*sqrt(pi*|z|) when x = 0.
double cc_distance_from_identity(const HTypeGroup& G, const Point& g);

// Left-invariant distance: d(g, h) = d(0, g^{-1} h).
double cc_distance(const HTypeGroup& G, const Point& a, const Point& b);

// Volume density of the chart:
//   A(r, rho) = r^{2m} (1/2 - sin rho/(2 rho))^{m-1} (2-2cos rho)^{n-1}
//               (2 - 2cos rho - rho sin rho),
// strictly positive for r > 0, 0 < rho < 2*pi.
double jacobian_A(const HTypeGroup& G, double r, double rho);

// A(r, rho) / r^{2m}: the purely angular factor, shared with the kernel
// convolution weights.
double jacobian_angular(int n, int m, double rho);

// jacobian_angular(n, m, rho) / rho^{2(n+m)}. Bounded as rho -> 0, so products
// like delta^{2n+2m-1} rho^{m-1} * (this) never overflow for small rho.
double jacobian_angular_scaled(int n, int m, double rho);

// R1 if rho <= pi, R2 if rho <= 2*pi - 1/r^2, else R3.
// Throws InsideBall when r*rho < 1. Independent of the group.
RegionLabel region_classify(double r, double rho);
RegionLabel region_classify(const HTypeGroup& G, const GeodesicCoords& c);

bool in_unit_ball(const HTypeGroup& G, const Point& g);

// Cancellation-free scalar pieces, exposed for the kernel quadrature.
double two_minus_two_cos(double theta);  // 2 - 2 cos(theta) = 4 sin^2(theta/2)
double theta_minus_sin(double theta);    // theta - sin(theta), series below 0.2

}  // namespace htype

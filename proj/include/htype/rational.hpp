#pragma once

#include <gmpxx.h>

#include <string>

namespace htype {

// Arbitrary-precision rational scalar used by the exact polynomial layer.
using Rational = mpq_class;

// Parses "p", "p/q", or a decimal literal such as "-0.25" or "1e-3" into an
// exact rational. Decimal strings convert exactly (no double round trip).
Rational parse_rational(const std::string& text);

std::string to_string(const Rational& q);

inline double to_double(const Rational& q) { return q.get_d(); }

// Every finite double is a dyadic rational, so this conversion is exact.
inline Rational rational_from_double(double v) { return Rational(v); }

}  // namespace htype

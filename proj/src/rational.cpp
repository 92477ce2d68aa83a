#include "htype/rational.hpp"

#include <cctype>
#include <stdexcept>

namespace htype {

namespace {

Rational pow10(long e) {
  mpz_class p;
  mpz_ui_pow_ui(p.get_mpz_t(), 10, static_cast<unsigned long>(e < 0 ? -e : e));
  return e < 0 ? Rational(1, p) : Rational(p);
}

}  // namespace

Rational parse_rational(const std::string& text) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  if (s.empty()) throw std::invalid_argument("empty rational literal");

  if (s.find('/') != std::string::npos) {
    Rational q;
    if (q.set_str(s, 10) != 0 || q.get_den() == 0)
      throw std::invalid_argument("bad rational literal: " + text);
    q.canonicalize();
    return q;
  }

  if (s.find('.') == std::string::npos && s.find('e') == std::string::npos &&
      s.find('E') == std::string::npos) {
    Rational q;
    if (q.set_str(s, 10) != 0) throw std::invalid_argument("bad integer literal: " + text);
    q.canonicalize();
    return q;
  }

  // Decimal form: [sign] digits [. digits] [e exp]
  bool neg = false;
  std::size_t i = 0;
  if (s[i] == '+' || s[i] == '-') neg = (s[i++] == '-');
  std::string digits;
  long frac_len = 0, exp10 = 0;
  bool seen_dot = false, seen_digit = false;
  for (; i < s.size(); ++i) {
    char c = s[i];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digits.push_back(c);
      seen_digit = true;
      if (seen_dot) ++frac_len;
    } else if (c == '.' && !seen_dot) {
      seen_dot = true;
    } else if (c == 'e' || c == 'E') {
      exp10 = std::stol(s.substr(i + 1));
      break;
    } else {
      throw std::invalid_argument("bad decimal literal: " + text);
    }
  }
  if (!seen_digit) throw std::invalid_argument("bad decimal literal: " + text);
  mpz_class mant(digits.empty() ? "0" : digits, 10);
  Rational q(mant);
  q *= pow10(exp10 - frac_len);
  if (neg) q = -q;
  q.canonicalize();
  return q;
}

std::string to_string(const Rational& q) { return q.get_str(); }

}  // namespace htype

#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <string>
#include <string_view>

namespace ccl {

using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;

/// Parses "num/den", an integer, or a decimal such as "0.25" / "-1.5e-2"
/// into an exact rational. Throws InputError on malformed text.
Rational parse_rational(std::string_view text);

/// Canonical "num/den" (or "num" when the denominator is 1).
std::string to_string(const Rational& r);

double to_double(const Rational& r);

/// Exact value of a finite double (every double is a dyadic rational).
Rational exact_rational(double x);

template <class T>
T scalar_from(const Rational& r);

template <>
inline Rational scalar_from<Rational>(const Rational& r) {
  return r;
}

template <>
inline double scalar_from<double>(const Rational& r) {
  return to_double(r);
}

inline double as_double(const Rational& r) { return to_double(r); }
inline double as_double(double x) { return x; }

}  // namespace ccl

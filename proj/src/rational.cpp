#include <ccl/error.hpp>
#include <ccl/rational.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

namespace ccl {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

Rational parse_integer(std::string_view s) {
  bool negative = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  if (!all_digits(s)) throw InputError("malformed integer '" + std::string(s) + "'");
  // A leading zero would make GMP read the digits as octal.
  s.remove_prefix(std::min(s.find_first_not_of('0'), s.size() - 1));
  Rational r{boost::multiprecision::mpz_int(std::string(s))};
  return negative ? Rational(-r) : r;
}

Rational pow10(long e) {
  Rational r(1);
  Rational ten(10);
  for (long i = 0; i < (e < 0 ? -e : e); ++i) r *= ten;
  return e < 0 ? Rational(1 / r) : r;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.empty()) throw InputError("empty rational");

  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    Rational num = parse_integer(text.substr(0, slash));
    Rational den = parse_integer(text.substr(slash + 1));
    if (den == 0) throw InputError("zero denominator in '" + std::string(text) + "'");
    return num / den;
  }

  std::string_view mantissa = text;
  long exponent = 0;
  if (auto e = text.find_first_of("eE"); e != std::string_view::npos) {
    mantissa = text.substr(0, e);
    std::string_view exp_text = text.substr(e + 1);
    std::string_view digits = exp_text;
    if (!digits.empty() && (digits.front() == '-' || digits.front() == '+')) digits.remove_prefix(1);
    if (!all_digits(digits) || digits.size() > 6)
      throw InputError("malformed exponent in '" + std::string(text) + "'");
    exponent = std::stol(std::string(exp_text));
  }

  bool negative = false;
  if (!mantissa.empty() && (mantissa.front() == '-' || mantissa.front() == '+')) {
    negative = mantissa.front() == '-';
    mantissa.remove_prefix(1);
  }
  std::string digits;
  long frac_len = 0;
  if (auto dot = mantissa.find('.'); dot != std::string_view::npos) {
    std::string_view ip = mantissa.substr(0, dot);
    std::string_view fp = mantissa.substr(dot + 1);
    if ((!ip.empty() && !all_digits(ip)) || (!fp.empty() && !all_digits(fp)) || (ip.empty() && fp.empty()))
      throw InputError("malformed decimal '" + std::string(text) + "'");
    digits = std::string(ip) + std::string(fp);
    frac_len = static_cast<long>(fp.size());
  } else {
    if (!all_digits(mantissa)) throw InputError("malformed number '" + std::string(text) + "'");
    digits = std::string(mantissa);
  }
  // A leading zero would make GMP read the digits as octal.
  digits.erase(0, std::min(digits.find_first_not_of('0'), digits.size() - 1));
  Rational r{boost::multiprecision::mpz_int(digits)};
  r *= pow10(exponent - frac_len);
  return negative ? Rational(-r) : r;
}

std::string to_string(const Rational& r) { return r.str(); }

double to_double(const Rational& r) { return r.convert_to<double>(); }

Rational exact_rational(double x) {
  if (!std::isfinite(x)) throw InputError("non-finite value");
  int exp = 0;
  double mant = std::frexp(x, &exp);
  // mant * 2^53 is an integer for every double.
  auto scaled = static_cast<long long>(std::ldexp(mant, 53));
  Rational r(scaled);
  exp -= 53;
  Rational two(2);
  Rational scale(1);
  for (int i = 0; i < (exp < 0 ? -exp : exp); ++i) scale *= two;
  return exp < 0 ? Rational(r / scale) : Rational(r * scale);
}

}  // namespace ccl

#pragma once

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace walshlab {

namespace mp = boost::multiprecision;

using BigInt = mp::number<mp::gmp_int, mp::et_off>;
using Rational = mp::number<mp::gmp_rational, mp::et_off>;
// 80 decimal digits is a little over 265 bits of mantissa.
using Real = mp::number<mp::mpfr_float_backend<80>, mp::et_off>;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown when operands come from different groups (dimension, degree or variant).
class MismatchError : public Error {
 public:
  using Error::Error;
};

inline BigInt floor_div(const Rational& q) {
  BigInt n = mp::numerator(q);
  BigInt d = mp::denominator(q);
  BigInt r = n / d;  // truncates toward zero
  if (n < 0 && r * d != n) r -= 1;
  return r;
}

inline BigInt ceil_div(const Rational& q) { return -floor_div(-q); }

/// Parses "p/q", "p" or "-p/q" into an exact rational.
inline Rational parse_rational(const std::string& text) {
  auto slash = text.find('/');
  try {
    if (slash == std::string::npos) return Rational(BigInt(text));
    BigInt num(text.substr(0, slash));
    BigInt den(text.substr(slash + 1));
    if (den == 0) throw Error("zero denominator in rational '" + text + "'");
    return Rational(num, den);
  } catch (const std::runtime_error& e) {
    throw Error("cannot parse rational '" + text + "'");
  }
}

/// Canonical "p/q" (or "p" for integers) text form used in every output format.
inline std::string to_string(const Rational& q) {
  if (mp::denominator(q) == 1) return mp::numerator(q).str();
  return mp::numerator(q).str() + "/" + mp::denominator(q).str();
}

inline std::string to_string(const BigInt& n) { return n.str(); }

inline BigInt ipow(BigInt base, std::uint64_t exp) {
  BigInt result = 1;
  while (exp) {
    if (exp & 1) result *= base;
    exp >>= 1;
    if (exp) base *= base;
  }
  return result;
}

inline Rational rpow(const Rational& base, std::uint64_t exp) {
  return Rational(ipow(mp::numerator(base), exp), ipow(mp::denominator(base), exp));
}

inline std::size_t bit_length(const BigInt& n) {
  if (n == 0) return 0;
  return mp::msb(mp::abs(n)) + 1;
}

inline std::int64_t mod_floor(std::int64_t a, std::int64_t m) {
  std::int64_t r = a % m;
  return r < 0 ? r + m : r;
}

inline std::uint64_t mod_floor(const BigInt& a, std::uint64_t m) {
  BigInt r = a % m;
  if (r < 0) r += m;
  return r.convert_to<std::uint64_t>();
}

}  // namespace walshlab

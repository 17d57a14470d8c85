#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

namespace effeq {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Parses "p", "p/q" or a plain decimal such as "1.25" into an exact rational.
Rational parse_rational(const std::string& text);

std::string to_string(const Rational& r);

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

/// num / den for den != 0. Boost 1.74 rejects negative denominators in the
/// two-argument constructor, so the sign is moved to the numerator first.
inline Rational make_rational(BigInt num, BigInt den) {
  if (den < 0) {
    num = -num;
    den = -den;
  }
  return Rational(num, den);
}

/// Exact real number of the form (a + b*sqrt(r)) with rational a, b and
/// square-free positive integer r. r == 1 encodes a plain rational (b == 0).
class QuadraticSurd {
 public:
  QuadraticSurd() = default;
  explicit QuadraticSurd(Rational rational);
  /// Builds a + b*sqrt(radicand), extracting square factors from the radicand.
  QuadraticSurd(Rational a, Rational b, BigInt radicand);

  const Rational& rational_part() const { return a_; }
  const Rational& surd_coefficient() const { return b_; }
  const BigInt& radicand() const { return r_; }
  bool is_rational() const { return b_ == 0; }

  /// -1, 0 or +1, decided exactly.
  int sign() const;
  double to_double() const;
  std::string to_string() const;

  friend bool operator==(const QuadraticSurd& x, const QuadraticSurd& y) {
    return x.a_ == y.a_ && x.b_ == y.b_ && x.r_ == y.r_;
  }
  /// Exact total order.
  friend bool operator<(const QuadraticSurd& x, const QuadraticSurd& y);

 private:
  Rational a_{0};
  Rational b_{0};
  BigInt r_{1};
};

/// Largest s with s*s <= n (n >= 0).
BigInt isqrt(const BigInt& n);

}  // namespace effeq

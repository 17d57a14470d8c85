#include "effeq/rational.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace effeq {

namespace {

int sign_of(const Rational& r) { return r > 0 ? 1 : (r < 0 ? -1 : 0); }

// sign(a + b*sqrt(R)) for R >= 0, R not necessarily square-free.
int sign_of(const Rational& a, const Rational& b, const BigInt& R) {
  const int sa = sign_of(a);
  const int sb = (R == 0) ? 0 : sign_of(b);
  if (sb == 0) return sa;
  if (sa == 0) return sb;
  if (sa == sb) return sa;
  const Rational lhs = a * a;
  const Rational rhs = b * b * Rational(R);
  if (lhs > rhs) return sa;
  if (lhs < rhs) return sb;
  return 0;
}

// sign(B*sqrt(r) + C*sqrt(s)).
int sign_of_pair(const Rational& B, const BigInt& r, const Rational& C, const BigInt& s) {
  const int sB = sign_of(B);
  const int sC = sign_of(C);
  if (sB == 0) return sC;
  if (sC == 0) return sB;
  if (sB == sC) return sB;
  const Rational lhs = B * B * Rational(r);
  const Rational rhs = C * C * Rational(s);
  if (lhs > rhs) return sB;
  if (lhs < rhs) return sC;
  return 0;
}

BigInt icbrt(const BigInt& n) {
  BigInt lo = 0;
  BigInt hi = 1;
  while (hi * hi * hi <= n) hi *= 2;
  while (hi - lo > 1) {
    BigInt mid = (lo + hi) / 2;
    if (mid * mid * mid <= n) lo = mid; else hi = mid;
  }
  return lo;
}

// n = square * squarefree; returns {sqrt(square), squarefree}.
std::pair<BigInt, BigInt> split_square(BigInt n) {
  BigInt outside = 1;
  BigInt inside = 1;
  const BigInt bound = icbrt(n) + 1;
  for (BigInt p = 2; p <= bound && p * p <= n; ++p) {
    int power = 0;
    while (n % p == 0) {
      n /= p;
      ++power;
    }
    for (int i = 0; i + 1 < power; i += 2) outside *= p;
    if (power % 2 == 1) inside *= p;
  }
  // The remaining cofactor has at most two prime factors above the bound.
  if (n > 1) {
    const BigInt s = isqrt(n);
    if (s * s == n) outside *= s; else inside *= n;
  }
  return {outside, inside};
}

}  // namespace

BigInt isqrt(const BigInt& n) {
  if (n < 0) throw std::domain_error("isqrt of negative integer");
  return boost::multiprecision::sqrt(n);
}

Rational parse_rational(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("empty rational literal");
  const auto slash = text.find('/');
  if (slash != std::string::npos) {
    const BigInt num(text.substr(0, slash));
    const BigInt den(text.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("zero denominator in '" + text + "'");
    return make_rational(num, den);
  }
  const auto dot = text.find('.');
  if (dot == std::string::npos) return Rational(BigInt(text));
  std::string digits = text.substr(0, dot) + text.substr(dot + 1);
  const auto scale = text.size() - dot - 1;
  BigInt den = 1;
  for (std::size_t i = 0; i < scale; ++i) den *= 10;
  if (digits == "-" || digits == "+" || digits.empty()) digits += "0";
  return Rational(BigInt(digits), den);
}

std::string to_string(const Rational& r) {
  std::ostringstream os;
  os << boost::multiprecision::numerator(r);
  if (boost::multiprecision::denominator(r) != 1) os << '/' << boost::multiprecision::denominator(r);
  return os.str();
}

QuadraticSurd::QuadraticSurd(Rational rational) : a_(std::move(rational)) {}

QuadraticSurd::QuadraticSurd(Rational a, Rational b, BigInt radicand) : a_(std::move(a)) {
  if (radicand < 0) throw std::domain_error("negative radicand");
  if (radicand == 0 || b == 0) return;
  auto [outside, inside] = split_square(std::move(radicand));
  if (inside == 1) {
    a_ += b * Rational(outside);
  } else {
    b_ = b * Rational(outside);
    r_ = inside;
  }
}

int QuadraticSurd::sign() const { return sign_of(a_, b_, r_); }

double QuadraticSurd::to_double() const {
  return a_.convert_to<double>() + b_.convert_to<double>() * std::sqrt(r_.convert_to<double>());
}

std::string QuadraticSurd::to_string() const {
  if (is_rational()) return effeq::to_string(a_);
  std::ostringstream os;
  os << effeq::to_string(a_) << (b_ > 0 ? "+" : "-") << effeq::to_string(b_ > 0 ? b_ : Rational(-b_))
     << "*sqrt(" << r_ << ")";
  return os.str();
}

bool operator<(const QuadraticSurd& x, const QuadraticSurd& y) {
  const Rational A = x.a_ - y.a_;
  int s = 0;
  if (x.r_ == y.r_) {
    s = sign_of(A, x.b_ - y.b_, x.r_);
  } else {
    // sign(A + u) with u = bx*sqrt(rx) - by*sqrt(ry)
    const int sA = sign_of(A);
    const int su = sign_of_pair(x.b_, x.r_, -y.b_, y.r_);
    if (su == 0) s = sA;
    else if (sA == 0 || sA == su) s = su;
    else {
      // compare A^2 with u^2 = bx^2 rx + by^2 ry - 2 bx by sqrt(rx ry)
      const Rational base = A * A - x.b_ * x.b_ * Rational(x.r_) - y.b_ * y.b_ * Rational(y.r_);
      const int cmp = sign_of(base, 2 * x.b_ * y.b_, x.r_ * y.r_);
      s = cmp > 0 ? sA : (cmp < 0 ? su : 0);
    }
  }
  return s < 0;
}

}  // namespace effeq

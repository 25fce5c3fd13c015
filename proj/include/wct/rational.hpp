#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace wct {

// Exact rational arithmetic on 64-bit numerator/denominator, normalized so the
// denominator is positive and gcd(|num|, den) == 1. All operations go through
// 128-bit intermediates and throw std::overflow_error if a reduced result does
// not fit; instance data in this project is small enough that this never fires
// in practice.
class Rational {
 public:
  Rational() = default;
  Rational(long long n) : num_(n), den_(1) {}  // NOLINT: implicit by design
  Rational(long long n, long long d) { assign(n, d); }

  static Rational from_double_exact(double v) {
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite value");
    if (v == 0.0) return Rational(0);
    int exp = 0;
    double mant = std::frexp(v, &exp);  // v = mant * 2^exp, |mant| in [0.5, 1)
    auto n = static_cast<long long>(std::ldexp(mant, 53));
    exp -= 53;
    while (n != 0 && (n & 1) == 0 && exp < 0) {
      n >>= 1;
      ++exp;
    }
    if (exp >= 0) {
      if (exp > 62) throw std::overflow_error("double too large for rational");
      return Rational(n << exp);
    }
    if (-exp > 62) throw std::overflow_error("double too fine for rational");
    return Rational(n, 1LL << -exp);
  }

  long long num() const { return num_; }
  long long den() const { return den_; }
  double value() const { return static_cast<double>(num_) / static_cast<double>(den_); }
  bool is_zero() const { return num_ == 0; }
  bool is_positive() const { return num_ > 0; }
  bool is_integer() const { return den_ == 1; }

  std::string str() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
  }

  friend Rational operator+(const Rational& a, const Rational& b) {
    I128 n = I128(a.num_) * b.den_ + I128(b.num_) * a.den_;
    I128 d = I128(a.den_) * b.den_;
    return reduced(n, d);
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    I128 n = I128(a.num_) * b.den_ - I128(b.num_) * a.den_;
    I128 d = I128(a.den_) * b.den_;
    return reduced(n, d);
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return reduced(I128(a.num_) * b.num_, I128(a.den_) * b.den_);
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw std::domain_error("rational division by zero");
    return reduced(I128(a.num_) * b.den_, I128(a.den_) * b.num_);
  }
  Rational operator-() const {
    Rational r;
    r.num_ = -num_;
    r.den_ = den_;
    return r;
  }
  Rational& operator+=(const Rational& b) { return *this = *this + b; }
  Rational& operator-=(const Rational& b) { return *this = *this - b; }
  Rational& operator*=(const Rational& b) { return *this = *this * b; }
  Rational& operator/=(const Rational& b) { return *this = *this / b; }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
  friend bool operator<(const Rational& a, const Rational& b) {
    return I128(a.num_) * b.den_ < I128(b.num_) * a.den_;
  }
  friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
  friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
  friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

  friend const Rational& min(const Rational& a, const Rational& b) { return b < a ? b : a; }
  friend const Rational& max(const Rational& a, const Rational& b) { return a < b ? b : a; }

 private:
  using I128 = __int128;

  void assign(long long n, long long d) {
    if (d == 0) throw std::domain_error("zero denominator");
    *this = reduced(I128(n), I128(d));
  }

  static I128 gcd128(I128 a, I128 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
      I128 t = a % b;
      a = b;
      b = t;
    }
    return a;
  }

  static Rational reduced(I128 n, I128 d) {
    if (d < 0) {
      n = -n;
      d = -d;
    }
    if (n == 0) {
      Rational r;
      r.num_ = 0;
      r.den_ = 1;
      return r;
    }
    I128 g = gcd128(n, d);
    n /= g;
    d /= g;
    constexpr I128 lim = I128(INT64_MAX);
    if (n > lim || n < -lim || d > lim) throw std::overflow_error("rational overflow");
    Rational r;
    r.num_ = static_cast<long long>(n);
    r.den_ = static_cast<long long>(d);
    return r;
  }

  long long num_ = 0;
  long long den_ = 1;
};

}  // namespace wct

#pragma once

#include <compare>
#include <cstdint>
#include <ostream>
#include <stdexcept>

namespace vmc {

/// Exact rational number with 64-bit numerator and denominator.
///
/// Values are kept normalized (den > 0, gcd(num, den) == 1). Intermediate
/// products use 128-bit arithmetic; results that do not fit back into 64 bits
/// throw std::overflow_error instead of silently wrapping.
class Rational {
 public:
  constexpr Rational() = default;
  Rational(std::int64_t num, std::int64_t den = 1) {  // NOLINT: implicit from integer
    if (den == 0) throw std::domain_error("Rational: zero denominator");
    assign(static_cast<Wide>(num), static_cast<Wide>(den));
  }

  static Rational from_wide(__int128 num, __int128 den) {
    if (den == 0) throw std::domain_error("Rational: zero denominator");
    Rational r;
    r.assign(num, den);
    return r;
  }

  [[nodiscard]] std::int64_t num() const { return num_; }
  [[nodiscard]] std::int64_t den() const { return den_; }
  [[nodiscard]] double to_double() const {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }

  friend Rational operator+(const Rational& a, const Rational& b) {
    return from_wide(Wide{a.num_} * b.den_ + Wide{b.num_} * a.den_, Wide{a.den_} * b.den_);
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    return from_wide(Wide{a.num_} * b.den_ - Wide{b.num_} * a.den_, Wide{a.den_} * b.den_);
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return from_wide(Wide{a.num_} * b.num_, Wide{a.den_} * b.den_);
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw std::domain_error("Rational: division by zero");
    return from_wide(Wide{a.num_} * b.den_, Wide{a.den_} * b.num_);
  }
  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    return Wide{a.num_} * b.den_ <=> Wide{b.num_} * a.den_;
  }

  friend std::ostream& operator<<(std::ostream& os, const Rational& r) {
    os << r.num_;
    if (r.den_ != 1) os << '/' << r.den_;
    return os;
  }

 private:
  using Wide = __int128;

  static Wide wide_gcd(Wide a, Wide b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
      Wide t = a % b;
      a = b;
      b = t;
    }
    return a;
  }

  void assign(Wide num, Wide den) {
    if (den < 0) {
      num = -num;
      den = -den;
    }
    const Wide g = wide_gcd(num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
    constexpr Wide lo = INT64_MIN;
    constexpr Wide hi = INT64_MAX;
    if (num < lo || num > hi || den > hi) throw std::overflow_error("Rational: 64-bit overflow");
    num_ = static_cast<std::int64_t>(num);
    den_ = static_cast<std::int64_t>(den);
  }

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

inline Rational min(const Rational& a, const Rational& b) { return b < a ? b : a; }

}  // namespace vmc

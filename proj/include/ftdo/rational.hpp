#pragma once

#include <compare>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <string>

namespace ftdo {

/// Exact non-negative-denominator fraction. Comparisons cross-multiply in
/// 128-bit arithmetic so thresholds such as 1/(100 C log n) compare exactly.
class Rational {
public:
  constexpr Rational() = default;
  constexpr Rational(std::int64_t num, std::int64_t den = 1) : num_(num), den_(den) {
    normalize();
  }

  constexpr std::int64_t num() const { return num_; }
  constexpr std::int64_t den() const { return den_; }
  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  friend constexpr bool operator==(const Rational &a, const Rational &b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend constexpr std::strong_ordering operator<=>(const Rational &a, const Rational &b) {
    const __int128 lhs = static_cast<__int128>(a.num_) * b.den_;
    const __int128 rhs = static_cast<__int128>(b.num_) * a.den_;
    if (lhs < rhs)
      return std::strong_ordering::less;
    if (lhs > rhs)
      return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

  std::string str() const { return std::to_string(num_) + "/" + std::to_string(den_); }
  friend std::ostream &operator<<(std::ostream &os, const Rational &r) { return os << r.str(); }

private:
  constexpr void normalize() {
    if (den_ < 0) {
      den_ = -den_;
      num_ = -num_;
    }
    if (den_ == 0) {
      // Callers never construct x/0; keep a canonical value instead of UB.
      num_ = num_ == 0 ? 0 : (num_ > 0 ? 1 : -1);
      return;
    }
    const std::int64_t g = std::gcd(num_ < 0 ? -num_ : num_, den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
  }

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

} // namespace ftdo

#pragma once

#include <compare>
#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>

namespace logtax {

/// Non-negative exact rational. Scores are ratios of occurrence counts, so
/// they are kept as numerator/denominator and only turned into doubles for
/// display.
struct Fraction {
  std::uint64_t num = 0;
  std::uint64_t den = 1;

  constexpr Fraction() = default;
  constexpr Fraction(std::uint64_t n, std::uint64_t d) : num(n), den(d) {}

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }

  /// Same fraction in lowest terms.
  Fraction reduced() const;

  /// Value equality: 1/2 == 2/4.
  friend bool operator==(const Fraction& a, const Fraction& b) {
    return static_cast<unsigned __int128>(a.num) * b.den ==
           static_cast<unsigned __int128>(b.num) * a.den;
  }
  friend std::strong_ordering operator<=>(const Fraction& a, const Fraction& b) {
    return static_cast<unsigned __int128>(a.num) * b.den <=>
           static_cast<unsigned __int128>(b.num) * a.den;
  }

  /// Identical numerator and denominator, not just equal value.
  bool same_representation(const Fraction& other) const {
    return num == other.num && den == other.den;
  }

  /// Decimal rendering rounded half-up to `digits` fractional digits using
  /// integer arithmetic only, e.g. 2/3 -> "0.666667".
  std::string to_decimal(int digits = 6) const;
};

/// Parse a non-negative decimal such as "0.7", "1", "1.0" or ".25" into an
/// exact fraction (7/10, 1/1, 1/1, 1/4). Throws ValidationError on anything
/// else.
Fraction parse_decimal_fraction(std::string_view text);

std::ostream& operator<<(std::ostream& os, const Fraction& f);

}  // namespace logtax

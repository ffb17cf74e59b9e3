#include "logtax/fraction.hpp"

#include <cctype>
#include <numeric>
#include <string>

#include "logtax/error.hpp"

namespace logtax {

Fraction Fraction::reduced() const {
  if (num == 0) return {0, 1};
  auto g = std::gcd(num, den);
  return {num / g, den / g};
}

std::string Fraction::to_decimal(int digits) const {
  unsigned __int128 scale = 1;
  for (int d = 0; d < digits; ++d) scale *= 10;
  // round half up: floor((2 * num * scale + den) / (2 * den))
  unsigned __int128 q = (2 * static_cast<unsigned __int128>(num) * scale + den) /
                        (2 * static_cast<unsigned __int128>(den));
  auto whole = static_cast<std::uint64_t>(q / scale);
  auto frac = static_cast<std::uint64_t>(q % scale);
  std::string out = std::to_string(whole);
  if (digits > 0) {
    std::string f = std::to_string(frac);
    out += '.';
    out.append(static_cast<std::size_t>(digits) - f.size(), '0');
    out += f;
  }
  return out;
}

Fraction parse_decimal_fraction(std::string_view text) {
  auto fail = [&] { return ValidationError("not a decimal number: '" + std::string(text) + "'"); };
  if (text.empty()) throw fail();

  std::uint64_t num = 0;
  std::uint64_t den = 1;
  bool seen_dot = false;
  bool seen_digit = false;
  for (char c : text) {
    if (c == '.') {
      if (seen_dot) throw fail();
      seen_dot = true;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      if (num > 100'000'000'000'000ULL || den > 100'000'000'000'000ULL) throw fail();
      num = num * 10 + static_cast<std::uint64_t>(c - '0');
      if (seen_dot) den *= 10;
      seen_digit = true;
    } else {
      throw fail();
    }
  }
  if (!seen_digit) throw fail();
  return Fraction{num, den}.reduced();
}

std::ostream& operator<<(std::ostream& os, const Fraction& f) {
  return os << f.num << '/' << f.den;
}

}  // namespace logtax

#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace lexsim {

/// Signed fixed-point decimal with `Digits` fractional digits, stored as a
/// scaled 64-bit integer. Addition and subtraction are exact; scaling by
/// another fixed-point value rounds half-to-even at the result's precision.
template <int Digits>
class Fixed {
 public:
  static constexpr int kDigits = Digits;
  static constexpr std::int64_t kScale = [] {
    std::int64_t s = 1;
    for (int i = 0; i < Digits; ++i) s *= 10;
    return s;
  }();

  constexpr Fixed() = default;

  static constexpr Fixed from_units(std::int64_t units) {
    Fixed f;
    f.units_ = units;
    return f;
  }
  static constexpr Fixed from_integer(std::int64_t whole) { return from_units(whole * kScale); }

  /// Parses a plain decimal literal ("12", "-0.5", "1.25e3" is not accepted).
  /// Digits beyond the precision are rounded half-to-even.
  static Fixed parse(std::string_view text);

  /// Nearest representable value to `value`, ties to even. Used only at
  /// boundaries where a binary float enters (generators, CLI flags).
  static Fixed from_double(double value);

  constexpr std::int64_t units() const { return units_; }
  double to_double() const { return static_cast<double>(units_) / static_cast<double>(kScale); }

  /// Canonical text with exactly `Digits` fractional digits.
  std::string str() const;

  constexpr Fixed operator-() const { return from_units(-units_); }
  constexpr Fixed& operator+=(Fixed o) {
    units_ += o.units_;
    return *this;
  }
  constexpr Fixed& operator-=(Fixed o) {
    units_ -= o.units_;
    return *this;
  }
  friend constexpr Fixed operator+(Fixed a, Fixed b) { return a += b; }
  friend constexpr Fixed operator-(Fixed a, Fixed b) { return a -= b; }
  friend constexpr Fixed operator*(Fixed a, std::int64_t n) { return from_units(a.units_ * n); }
  friend constexpr auto operator<=>(Fixed, Fixed) = default;

  constexpr bool is_zero() const { return units_ == 0; }
  constexpr bool is_negative() const { return units_ < 0; }

 private:
  std::int64_t units_ = 0;
};

/// US dollars, 6 decimal places.
using Money = Fixed<6>;
/// Dimensionless fraction (0.01129 == 1.129%), 9 decimal places.
using Rate = Fixed<9>;
/// USD per token unit, 9 decimal places.
using UnitPrice = Fixed<9>;

/// Round-half-even integer division of a 128-bit numerator.
__int128 div_round_half_even(__int128 num, __int128 den);

/// amount * rate, rounded half-even to micro-dollars.
Money scale(Money amount, Rate rate);
/// amount * price where amount is a token quantity given in decimal text.
Money scale_text(std::string_view amount, UnitPrice price);
/// a / b as a Rate (half-even); b must be non-zero.
Rate ratio(Money a, Money b);
/// Rate given in percent (1.129 -> 0.01129).
Rate rate_from_percent(std::string_view percent);

Money money_mean(__int128 sum_units, std::int64_t n);

/// Population standard deviation of a set of values, given exact running sums
/// of units and squared units.
Money money_pstddev(__int128 sum_units, __int128 sum_sq_units, std::int64_t n);

}  // namespace lexsim

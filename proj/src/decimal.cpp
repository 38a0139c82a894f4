#include "lexsim/decimal.hpp"

#include <cmath>
#include <limits>

#include "lexsim/error.hpp"

namespace lexsim {

namespace {

__int128 pow10_128(int n) {
  __int128 r = 1;
  for (int i = 0; i < n; ++i) r *= 10;
  return r;
}

struct ParsedDecimal {
  __int128 mantissa = 0;  // signed
  int scale = 0;          // number of fractional digits in mantissa
};

ParsedDecimal parse_decimal(std::string_view text) {
  auto fail = [&] {
    return Error(ErrorCode::InvalidArgument, "not a decimal number: '" + std::string(text) + "'");
  };
  std::size_t i = 0;
  while (i < text.size() && (text[i] == ' ' || text[i] == '\t')) ++i;
  std::size_t end = text.size();
  while (end > i && (text[end - 1] == ' ' || text[end - 1] == '\t' || text[end - 1] == '\r')) --end;
  bool negative = false;
  if (i < end && (text[i] == '-' || text[i] == '+')) {
    negative = text[i] == '-';
    ++i;
  }
  ParsedDecimal out;
  bool any_digit = false;
  bool in_fraction = false;
  constexpr __int128 kLimit = static_cast<__int128>(1) << 120;
  for (; i < end; ++i) {
    const char c = text[i];
    if (c == '.') {
      if (in_fraction) throw fail();
      in_fraction = true;
      continue;
    }
    if (c < '0' || c > '9') throw fail();
    any_digit = true;
    if (out.mantissa > kLimit / 10) {
      // Precision beyond ~36 significant digits is dropped from the fraction.
      if (in_fraction) continue;
      throw Error(ErrorCode::InvalidArgument, "decimal out of range: '" + std::string(text) + "'");
    }
    out.mantissa = out.mantissa * 10 + (c - '0');
    if (in_fraction) ++out.scale;
  }
  if (!any_digit) throw fail();
  if (negative) out.mantissa = -out.mantissa;
  return out;
}

__int128 rescale(const ParsedDecimal& d, int digits) {
  if (d.scale <= digits) return d.mantissa * pow10_128(digits - d.scale);
  return div_round_half_even(d.mantissa, pow10_128(d.scale - digits));
}

std::int64_t checked_i64(__int128 v, std::string_view what) {
  if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min()) {
    throw Error(ErrorCode::InvalidArgument, "value out of range: " + std::string(what));
  }
  return static_cast<std::int64_t>(v);
}

}  // namespace

__int128 div_round_half_even(__int128 num, __int128 den) {
  if (den < 0) {
    num = -num;
    den = -den;
  }
  __int128 q = num / den;
  __int128 r = num % den;
  if (r == 0) return q;
  // Work with the magnitude of the remainder; q truncates toward zero.
  const __int128 twice = (r < 0 ? -r : r) * 2;
  const int sign = num < 0 ? -1 : 1;
  if (twice > den || (twice == den && (q % 2 != 0))) q += sign;
  return q;
}

template <int Digits>
Fixed<Digits> Fixed<Digits>::parse(std::string_view text) {
  return from_units(checked_i64(rescale(parse_decimal(text), Digits), text));
}

template <int Digits>
Fixed<Digits> Fixed<Digits>::from_double(double value) {
  if (!std::isfinite(value)) throw Error(ErrorCode::InvalidArgument, "non-finite decimal value");
  const long double scaled = static_cast<long double>(value) * static_cast<long double>(kScale);
  if (std::fabs(scaled) > 9.2e18L) throw Error(ErrorCode::InvalidArgument, "decimal out of range");
  return from_units(static_cast<std::int64_t>(std::nearbyintl(scaled)));
}

template <int Digits>
std::string Fixed<Digits>::str() const {
  const bool negative = units_ < 0;
  // Avoid overflow on INT64_MIN by working in 128 bits.
  __int128 mag = units_;
  if (negative) mag = -mag;
  const auto whole = static_cast<unsigned long long>(mag / kScale);
  auto frac = static_cast<unsigned long long>(mag % kScale);
  std::string frac_text(Digits, '0');
  for (int i = Digits - 1; i >= 0; --i) {
    frac_text[static_cast<std::size_t>(i)] = static_cast<char>('0' + frac % 10);
    frac /= 10;
  }
  std::string out = negative ? "-" : "";
  out += std::to_string(whole);
  if constexpr (Digits > 0) out += "." + frac_text;
  return out;
}

template class Fixed<6>;
template class Fixed<9>;
template class Fixed<7>;

Money scale(Money amount, Rate rate) {
  const __int128 product = static_cast<__int128>(amount.units()) * rate.units();
  return Money::from_units(checked_i64(div_round_half_even(product, Rate::kScale), "scaled money"));
}

Money scale_text(std::string_view amount, UnitPrice price) {
  const ParsedDecimal d = parse_decimal(amount);
  // mantissa * price_units has scale (d.scale + 9); reduce to 6 digits.
  __int128 product = 0;
  if (__builtin_mul_overflow(d.mantissa, static_cast<__int128>(price.units()), &product)) {
    throw Error(ErrorCode::InvalidArgument, "token amount too large: " + std::string(amount));
  }
  const int drop = d.scale + UnitPrice::kDigits - Money::kDigits;
  return Money::from_units(checked_i64(div_round_half_even(product, pow10_128(drop)), amount));
}

Rate ratio(Money a, Money b) {
  if (b.is_zero()) throw Error(ErrorCode::InvalidArgument, "ratio with zero denominator");
  const __int128 num = static_cast<__int128>(a.units()) * Rate::kScale;
  return Rate::from_units(checked_i64(div_round_half_even(num, b.units()), "ratio"));
}

Rate rate_from_percent(std::string_view percent) {
  return Rate::from_units(checked_i64(rescale(parse_decimal(percent), Rate::kDigits - 2), percent));
}

Money money_mean(__int128 sum_units, std::int64_t n) {
  if (n <= 0) return Money{};
  return Money::from_units(checked_i64(div_round_half_even(sum_units, n), "mean"));
}

Money money_pstddev(__int128 sum_units, __int128 sum_sq_units, std::int64_t n) {
  if (n <= 0) return Money{};
  // n^2 * var = n * sum_sq - sum^2, exact in 128 bits for the magnitudes we see.
  const __int128 scaled_var = static_cast<__int128>(n) * sum_sq_units - sum_units * sum_units;
  if (scaled_var <= 0) return Money{};
  const long double var = static_cast<long double>(scaled_var) / (static_cast<long double>(n) * n);
  return Money::from_units(static_cast<std::int64_t>(std::nearbyintl(std::sqrt(var))));
}

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NegativeValue: return "NegativeValue";
    case ErrorCode::TimestampOrder: return "TimestampOrder";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::UnknownChain: return "UnknownChain";
    case ErrorCode::EmptyAddress: return "EmptyAddress";
    case ErrorCode::FileMissing: return "FileMissing";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::RowRejected: return "RowRejected";
    case ErrorCode::DuplicateKey: return "DuplicateKey";
    case ErrorCode::NonPositivePrice: return "NonPositivePrice";
    case ErrorCode::MissingPrice: return "MissingPrice";
    case ErrorCode::InvalidProfile: return "InvalidProfile";
    case ErrorCode::NegativeBalance: return "NegativeBalance";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::InsufficientHistory: return "InsufficientHistory";
    case ErrorCode::EmptyCompetingSet: return "EmptyCompetingSet";
    case ErrorCode::EmptyRoute: return "EmptyRoute";
    case ErrorCode::GridTooLarge: return "GridTooLarge";
    case ErrorCode::IoFailure: return "IoFailure";
  }
  return "Unknown";
}

}  // namespace lexsim

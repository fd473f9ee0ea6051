#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace epv {

// An exact non-negative fraction. A zero denominator means "undefined" and
// is carried through instead of collapsing to 0 or 1.
struct Ratio {
  std::int64_t num = 0;
  std::int64_t den = 0;

  bool defined() const noexcept { return den != 0; }

  // Throws InternalError when undefined.
  double value() const;

  std::optional<double> value_or_none() const {
    if (!defined()) return std::nullopt;
    return value();
  }

  // Fixed-point rendering with round-half-up done in integer arithmetic,
  // so the text never depends on platform float formatting. "n/a" when
  // undefined.
  std::string decimal(int places = 6) const;

  friend bool operator==(const Ratio&, const Ratio&) = default;
};

// Fixed-point rendering of a real; "n/a" for nullopt.
std::string format_decimal(std::optional<double> value, int places = 6);

// round-half-up(num / den) for non-negative operands, den > 0.
std::int64_t round_half_up(std::int64_t num, std::int64_t den);

}  // namespace epv

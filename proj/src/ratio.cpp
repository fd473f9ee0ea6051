#include "epv/ratio.hpp"

#include <cstdio>

#include "epv/errors.hpp"

namespace epv {

double Ratio::value() const {
  if (!defined()) throw InternalError("value() on undefined ratio");
  return static_cast<double>(num) / static_cast<double>(den);
}

std::string Ratio::decimal(int places) const {
  if (!defined()) return "n/a";
  __int128 scale = 1;
  for (int i = 0; i < places; ++i) scale *= 10;
  const bool negative = (num < 0) != (den < 0);
  __int128 n = num < 0 ? -static_cast<__int128>(num) : num;
  __int128 d = den < 0 ? -static_cast<__int128>(den) : den;
  __int128 fixed = (2 * n * scale + d) / (2 * d);
  const auto whole = static_cast<long long>(fixed / scale);
  const auto frac = static_cast<long long>(fixed % scale);
  char buf[64];
  if (places > 0) {
    std::snprintf(buf, sizeof buf, "%s%lld.%0*lld", negative && fixed != 0 ? "-" : "", whole,
                  places, frac);
  } else {
    std::snprintf(buf, sizeof buf, "%s%lld", negative && fixed != 0 ? "-" : "", whole);
  }
  return buf;
}

std::string format_decimal(std::optional<double> value, int places) {
  if (!value) return "n/a";
  char buf[64];
  double v = *value;
  if (v == 0.0) v = 0.0;  // no "-0.000000"
  std::snprintf(buf, sizeof buf, "%.*f", places, v);
  std::string out = buf;
  if (out.find_first_not_of("-0.") == std::string::npos && out[0] == '-') out.erase(0, 1);
  return out;
}

std::int64_t round_half_up(std::int64_t num, std::int64_t den) {
  if (den <= 0 || num < 0) throw InternalError("round_half_up expects num >= 0, den > 0");
  return (2 * num + den) / (2 * den);
}

}  // namespace epv

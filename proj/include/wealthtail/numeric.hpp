#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wealthtail/errors.hpp"

namespace wealthtail {

/// c * w^e evaluated in log space when the exponent leaves the range where
/// the direct product is safe. Wealth spans ~10^5..10^10, so c itself can be
/// of order w0^alpha and the naive product may overflow long before the
/// result does.
inline double scaled_pow(double c, double w, double e) {
  const double t = e * std::log(w);
  if (std::abs(t) > 600.0) return std::exp(std::log(c) + t);
  return c * std::exp(t);
}

/// Shortest decimal form that round-trips to the same double. Used for every
/// number emitted in CSV payloads so that CSV and JSON carry identical text.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

/// Smallest value whose cumulative weight reaches half the total.
inline double weighted_median(std::span<const double> values,
                              std::span<const double> weights,
                              double total) {
  double cum = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    cum += weights[i];
    if (cum >= 0.5 * total) return values[i];
  }
  return values.back();
}

/// R's type-7 sample quantile on sorted data.
inline double quantile_type7(std::span<const double> sorted, double p) {
  const std::size_t n = sorted.size();
  if (n == 1) return sorted[0];
  const double h = static_cast<double>(n - 1) * p;
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= n) return sorted[n - 1];
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

/// Parses a currency amount with an optional k/M/G suffix (10^3/10^6/10^9).
inline double parse_currency(std::string_view text) {
  if (text.empty()) throw validation_error("empty currency value");
  double mult = 1.0;
  switch (text.back()) {
    case 'k':
    case 'K':
      mult = 1e3;
      text.remove_suffix(1);
      break;
    case 'M':
    case 'm':
      mult = 1e6;
      text.remove_suffix(1);
      break;
    case 'G':
    case 'g':
      mult = 1e9;
      text.remove_suffix(1);
      break;
    default:
      break;
  }
  double value = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
    throw validation_error("not a currency amount: '" + std::string(text) + "'");
  return value * mult;
}

/// Composite Simpson rule of f on [a, b].
template <typename F>
double simpson(F&& f, double a, double b, std::size_t intervals) {
  if (intervals % 2 != 0) ++intervals;
  const double step = (b - a) / static_cast<double>(intervals);
  double sum = f(a) + f(b);
  for (std::size_t i = 1; i < intervals; ++i) {
    const double x = a + step * static_cast<double>(i);
    sum += f(x) * (i % 2 == 0 ? 2.0 : 4.0);
  }
  return sum * step / 3.0;
}

}  // namespace wealthtail

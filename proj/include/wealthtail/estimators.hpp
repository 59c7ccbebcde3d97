#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>

#include "wealthtail/errors.hpp"
#include "wealthtail/weighted_sample.hpp"

namespace wealthtail {

enum class AlphaMethod { ml, reg, reg_intercept, wijk };

inline std::string_view to_string(AlphaMethod method) {
  switch (method) {
    case AlphaMethod::ml: return "ml";
    case AlphaMethod::reg: return "reg";
    case AlphaMethod::reg_intercept: return "reg-intercept";
    case AlphaMethod::wijk: return "wijk";
  }
  return "?";
}

inline AlphaMethod alpha_method_from_string(std::string_view name) {
  if (name == "ml") return AlphaMethod::ml;
  if (name == "reg") return AlphaMethod::reg;
  if (name == "reg-intercept") return AlphaMethod::reg_intercept;
  if (name == "wijk") return AlphaMethod::wijk;
  throw configuration_error("unknown estimator '" + std::string(name) + "'");
}

struct AlphaEstimate {
  double alpha = 0.0;
  AlphaMethod method = AlphaMethod::ml;
  double w_min = 0.0;
  double tail_count = 0.0;  // N(w_min)
  /// Set when the tail mixes survey and rich-list data and the estimator
  /// relies on the empirical CCDF, which is undefined across the gap.
  bool combined_warning = false;
};

/// Inversion of van der Wijk's law:
/// alpha = [1 - w_min N(w_min) / sum_{w_i >= w_min} w_i n(w_i)]^{-1}.
inline AlphaEstimate alpha_wijk(const TailView& tail) {
  if (tail.size() == 0) throw degenerate_tail_error("empty tail");
  double wealth = 0.0;
  for (std::size_t i = 0; i < tail.size(); ++i)
    wealth += tail.values[i] * tail.weights[i];
  const double ratio = tail.w_min * tail.total / wealth;
  if (!(ratio < 1.0))
    throw degenerate_tail_error("tail mean does not exceed w_min");
  return {1.0 / (1.0 - ratio), AlphaMethod::wijk, tail.w_min, tail.total,
          tail.combined};
}

/// Weighted maximum-likelihood (Hill) estimator:
/// alpha = [sum (n(w_i)/N(w_min)) ln(w_i/w_min)]^{-1}.
inline AlphaEstimate alpha_ml(const TailView& tail) {
  if (tail.size() == 0) throw degenerate_tail_error("empty tail");
  const double log_wmin = std::log(tail.w_min);
  double mean_log = 0.0;
  for (std::size_t i = 0; i < tail.size(); ++i)
    mean_log += tail.weights[i] * (std::log(tail.values[i]) - log_wmin);
  mean_log /= tail.total;
  if (!(mean_log > 0.0))
    throw degenerate_tail_error("all tail mass sits at w_min");
  return {1.0 / mean_log, AlphaMethod::ml, tail.w_min, tail.total, false};
}

/// Log-log CCDF regression with y_i = ln(N(w_i)/N(w_min)) against
/// x_i = ln(w_i/w_min). Without an intercept the slope is sum(xy)/sum(x^2);
/// with one it is the ordinary two-parameter least-squares slope. Either
/// way the returned alpha is the negated slope.
inline AlphaEstimate alpha_reg(const TailView& tail, bool with_intercept) {
  if (tail.size() < 2)
    throw insufficient_data_error("regression needs at least 2 tail values");
  const double log_wmin = std::log(tail.w_min);
  const double log_total = std::log(tail.total);
  const std::size_t k = tail.size();

  double slope;
  if (!with_intercept) {
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      const double x = std::log(tail.values[i]) - log_wmin;
      const double y = std::log(tail.counts[i]) - log_total;
      sxy += x * y;
      sxx += x * x;
    }
    if (!(sxx > 0.0))
      throw insufficient_data_error("tail has a single distinct value");
    slope = sxy / sxx;
  } else {
    double sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      sx += std::log(tail.values[i]) - log_wmin;
      sy += std::log(tail.counts[i]) - log_total;
    }
    const double mx = sx / static_cast<double>(k);
    const double my = sy / static_cast<double>(k);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      const double dx = std::log(tail.values[i]) - log_wmin - mx;
      const double dy = std::log(tail.counts[i]) - log_total - my;
      sxy += dx * dy;
      sxx += dx * dx;
    }
    if (!(sxx > 0.0))
      throw insufficient_data_error("tail has a single distinct value");
    slope = sxy / sxx;
  }
  return {-slope,
          with_intercept ? AlphaMethod::reg_intercept : AlphaMethod::reg,
          tail.w_min, tail.total, tail.combined};
}

inline AlphaEstimate estimate_alpha(const TailView& tail, AlphaMethod method) {
  switch (method) {
    case AlphaMethod::ml: return alpha_ml(tail);
    case AlphaMethod::reg: return alpha_reg(tail, false);
    case AlphaMethod::reg_intercept: return alpha_reg(tail, true);
    case AlphaMethod::wijk: return alpha_wijk(tail);
  }
  throw configuration_error("unknown estimator");
}

}  // namespace wealthtail

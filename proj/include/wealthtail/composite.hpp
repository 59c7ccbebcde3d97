#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wealthtail/density.hpp"
#include "wealthtail/errors.hpp"
#include "wealthtail/numeric.hpp"
#include "wealthtail/pareto.hpp"
#include "wealthtail/weighted_sample.hpp"

namespace wealthtail {

enum class Normalization { bach, eckerstorfer, richlist };

inline std::string_view to_string(Normalization n) {
  switch (n) {
    case Normalization::bach: return "bach";
    case Normalization::eckerstorfer: return "eckerstorfer";
    case Normalization::richlist: return "richlist";
  }
  return "?";
}

inline Normalization normalization_from_string(std::string_view name) {
  if (name == "bach") return Normalization::bach;
  if (name == "eckerstorfer") return Normalization::eckerstorfer;
  if (name == "richlist") return Normalization::richlist;
  throw configuration_error("unknown normalization '" + std::string(name) + "'");
}

/// Histogram body plus Pareto tail. A data point exactly at w0 belongs to
/// the body in every sum. The tail constant is normalized against `total`,
/// so body mass / total plus tail_mass(w0) is one.
struct CompositeModel {
  std::vector<double> body_values;   // ascending, all <= w0
  std::vector<double> body_weights;  // possibly rescaled (eckerstorfer)
  ParetoTail tail;
  double total;  // N, or N' under the rich-list normalization
  Normalization normalization;
  std::optional<double> beta_prime;  // eckerstorfer only

  double body_weight() const {
    double sum = 0.0;
    for (double n : body_weights) sum += n;
    return sum;
  }

  /// Body contribution to mean wealth: sum of w_i n(w_i) / total.
  double body_mean_wealth() const {
    double sum = 0.0;
    for (std::size_t i = 0; i < body_values.size(); ++i)
      sum += body_values[i] * body_weights[i];
    return sum / total;
  }

  /// Model mean wealth per household (the denominator of every share).
  double mean_wealth() const {
    return body_mean_wealth() + partial_mean(tail, tail.w0);
  }

  double total_probability() const {
    return body_weight() / total + tail_mass(tail, tail.w0);
  }
};

namespace detail {

struct BodySplit {
  std::vector<double> values;
  std::vector<double> weights;
  double weight_above = 0.0;  // strict >
};

inline BodySplit split_at(const WeightedSample& sample, double w0) {
  BodySplit split;
  const auto& v = sample.values();
  const auto& n = sample.weights();
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] <= w0) {
      split.values.push_back(v[i]);
      split.weights.push_back(n[i]);
    } else {
      split.weight_above += n[i];
    }
  }
  return split;
}

}  // namespace detail

/// Tail weight matched to the sample weight above w0:
/// C = alpha w0^alpha (1/N) sum_{w_i > w0} n(w_i).
inline CompositeModel normalize_bach(const WeightedSample& sample, double alpha,
                                     double w0,
                                     std::optional<double> w_max = std::nullopt) {
  auto split = detail::split_at(sample, w0);
  if (!(split.weight_above > 0.0))
    throw degenerate_tail_error("no sample weight above w0");
  const double n_total = sample.total_weight();
  const double c = scaled_pow(alpha * split.weight_above / n_total, w0, alpha);
  return CompositeModel{std::move(split.values), std::move(split.weights),
                        ParetoTail(alpha, c, w0, w_max), n_total,
                        Normalization::bach, std::nullopt};
}

/// Tail weight matched at w_min instead of w0:
/// C' = alpha w_min^alpha (1/N) sum_{w_i > w_min} n(w_i),
/// with the weights at or below w_min rescaled by beta' so the model keeps
/// the original household count N.
inline CompositeModel normalize_eckerstorfer(
    const WeightedSample& sample, double alpha, double w_min, double w0,
    std::optional<double> w_max = std::nullopt) {
  if (!(w_min <= w0)) throw validation_error("w_min must not exceed w0");
  const auto& v = sample.values();
  const auto& n = sample.weights();
  const double n_total = sample.total_weight();

  double below = 0.0, between = 0.0, above_wmin = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] <= w_min) {
      below += n[i];
    } else {
      above_wmin += n[i];
      if (v[i] <= w0) between += n[i];
    }
  }
  if (!(above_wmin > 0.0))
    throw degenerate_tail_error("no sample weight above w_min");

  const double pareto_factor = std::exp(alpha * std::log(w_min / w0));
  const double numerator = n_total - between - pareto_factor * above_wmin;
  double beta_prime;
  if (below > 0.0) {
    beta_prime = numerator / below;
  } else if (std::abs(numerator) <= 1e-9 * n_total) {
    beta_prime = 1.0;
  } else {
    throw infeasible_rescale_error("no weight at or below w_min to rescale");
  }
  if (!(beta_prime > 0.0))
    throw infeasible_rescale_error(
        "tail mass exceeds the weight available below w_min (beta' <= 0)");

  auto split = detail::split_at(sample, w0);
  for (std::size_t i = 0; i < split.values.size(); ++i)
    if (split.values[i] <= w_min) split.weights[i] *= beta_prime;

  const double c = scaled_pow(alpha * above_wmin / n_total, w_min, alpha);
  return CompositeModel{std::move(split.values), std::move(split.weights),
                        ParetoTail(alpha, c, w0, w_max), n_total,
                        Normalization::eckerstorfer, beta_prime};
}

/// Tail anchored to the exact household count of a rich list:
///   N' = sum_{w_i <= w0} n(w_i) + N~(w1) (w1/w0)^alpha,
///   C'' = (N~(w1)/N') alpha w1^alpha,
/// with N~ counted at w1_count and w1 = w1_scale inside the powers.
inline CompositeModel normalize_richlist(
    const WeightedSample& sample, const RichList& rich, double alpha, double w0,
    std::optional<double> w_max = std::nullopt) {
  const double count = rich.count_at_w1();
  if (!(count > 0.0))
    throw insufficient_data_error("rich list empty above its threshold");
  const double w1 = rich.w1_scale();
  if (!(w0 < w1)) throw validation_error("w0 must lie below w1_scale");

  auto split = detail::split_at(sample, w0);
  double body = 0.0;
  for (double n : split.weights) body += n;
  const double n_prime = body + count * std::exp(alpha * std::log(w1 / w0));
  const double c = scaled_pow(alpha * count / n_prime, w1, alpha);
  return CompositeModel{std::move(split.values), std::move(split.weights),
                        ParetoTail(alpha, c, w0, w_max), n_prime,
                        Normalization::richlist, std::nullopt};
}

/// Truncation point read off a rich list: the highest value plus half the
/// distance to the second highest.
inline double estimate_wmax(const RichList& rich) {
  const auto& entries = rich.entries();
  if (entries.size() < 2)
    throw insufficient_data_error("w_max estimation needs at least 2 entries");
  return entries[0].wealth + 0.5 * (entries[0].wealth - entries[1].wealth);
}

struct W0Options {
  double grid_step_factor = 0.25;  // grid step = factor * bandwidth
  double rel_tol = 1e-9;
};

/// Scan trace of the continuity equation, for diagnostics output.
struct W0Trace {
  std::vector<double> w;
  std::vector<double> kernel;
  std::vector<double> fitted;
};

/// Solves f_kern(w0) - C(w0) w0^{-(alpha+1)} = 0 for the smallest root above
/// w_min. Under the bach and rich-list normalizations C is re-evaluated for
/// every candidate w0; under eckerstorfer C' is fixed by w_min. The root is
/// located by a sign-change scan in steps of a quarter bandwidth and refined
/// by bisection.
inline double solve_w0(const WeightedSample& sample, double alpha, double w_min,
                       Normalization normalization, const KernelDensity& kde,
                       const RichList* rich = nullptr,
                       const W0Options& options = {}, W0Trace* trace = nullptr) {
  const auto& v = sample.values();
  const auto& n = sample.weights();
  const double n_total = sample.total_weight();

  // suffix[i] = weight strictly above v[i-1]; suffix[0] = N
  std::vector<double> suffix(v.size() + 1, 0.0);
  for (std::size_t i = v.size(); i-- > 0;) suffix[i] = suffix[i + 1] + n[i];
  const auto weight_above = [&](double w) {
    const auto idx =
        std::upper_bound(v.begin(), v.end(), w) - v.begin();
    return suffix[idx];
  };

  double fixed_c = 0.0;
  double rich_count = 0.0, rich_w1 = 0.0;
  switch (normalization) {
    case Normalization::eckerstorfer: {
      const double above = weight_above(w_min);
      if (!(above > 0.0))
        throw degenerate_tail_error("no sample weight above w_min");
      fixed_c = scaled_pow(alpha * above / n_total, w_min, alpha);
      break;
    }
    case Normalization::richlist: {
      if (rich == nullptr)
        throw configuration_error("rich-list normalization needs a rich list");
      rich_count = rich->count_at_w1();
      if (!(rich_count > 0.0))
        throw insufficient_data_error("rich list empty above its threshold");
      rich_w1 = rich->w1_scale();
      break;
    }
    case Normalization::bach:
      break;
  }

  const auto fitted = [&](double w) {
    double c;
    switch (normalization) {
      case Normalization::bach:
        c = scaled_pow(alpha * weight_above(w) / n_total, w, alpha);
        break;
      case Normalization::eckerstorfer:
        c = fixed_c;
        break;
      case Normalization::richlist:
      default: {
        const double body = n_total - weight_above(w);
        const double n_prime =
            body + rich_count * std::exp(alpha * std::log(rich_w1 / w));
        c = scaled_pow(alpha * rich_count / n_prime, rich_w1, alpha);
        break;
      }
    }
    return scaled_pow(c, w, -(alpha + 1.0));
  };
  const auto h = [&](double w) { return kde(w) - fitted(w); };

  const double w_end = sample.max_value();
  if (!(w_end > w_min))
    throw configuration_error("no data above w_min to scan");
  double step = options.grid_step_factor * kde.bandwidth();
  step = std::min(step, (w_end - w_min) / 8.0);

  double prev_w = w_min;
  double prev_h = h(prev_w);
  if (trace != nullptr) {
    trace->w.push_back(prev_w);
    trace->kernel.push_back(kde(prev_w));
    trace->fitted.push_back(fitted(prev_w));
  }
  double lo = 0.0, hi = 0.0;
  bool bracketed = false;
  for (double w = w_min + step; !bracketed; w += step) {
    if (w > w_end) break;
    const double hw = h(w);
    if (trace != nullptr) {
      trace->w.push_back(w);
      trace->kernel.push_back(kde(w));
      trace->fitted.push_back(fitted(w));
    }
    if (hw == 0.0) return w;
    if (prev_h != 0.0 && (prev_h < 0.0) != (hw < 0.0)) {
      lo = prev_w;
      hi = w;
      bracketed = true;
    }
    prev_w = w;
    prev_h = hw;
  }
  if (!bracketed)
    throw no_root_error(
        "continuity equation has no sign change between w_min and the "
        "largest value; widen the grid or set w0 manually");

  double h_lo = h(lo);
  for (int iter = 0; iter < 200 && (hi - lo) > options.rel_tol * lo; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double hm = h(mid);
    if (hm == 0.0) return mid;
    if ((h_lo < 0.0) != (hm < 0.0)) {
      hi = mid;
    } else {
      lo = mid;
      h_lo = hm;
    }
  }
  return 0.5 * (lo + hi);
}

enum class ShareBranch { pareto, empirical };

inline std::string_view to_string(ShareBranch branch) {
  return branch == ShareBranch::pareto ? "pareto" : "empirical";
}

struct Percentile {
  double w_p = 0.0;
  ShareBranch branch = ShareBranch::pareto;
};

/// Wealth threshold above which the richest fraction p of households lies.
/// Inside the tail it is the analytic Pareto quantile; inside the body it is
/// the smallest value whose strictly-smaller cumulative weight reaches
/// (1-p) * total.
inline Percentile percentile(const CompositeModel& model, double p) {
  if (!(p > 0.0) || !(p < 1.0))
    throw std::domain_error("p must lie in (0, 1)");
  const double tail_p = tail_mass(model.tail, model.tail.w0);
  if (tail_p >= p) return {quantile(model.tail, p), ShareBranch::pareto};

  const double target = (1.0 - p) * model.total;
  double below = 0.0;
  for (std::size_t i = 0; i < model.body_values.size(); ++i) {
    if (below >= target) return {model.body_values[i], ShareBranch::empirical};
    below += model.body_weights[i];
  }
  // p falls inside the topmost body atom
  return {model.body_values.back(), ShareBranch::empirical};
}

struct ShareResult {
  double p = 0.0;
  double w_p = 0.0;
  double share = 0.0;
  ShareBranch branch = ShareBranch::pareto;
};

/// Share of total wealth held by the richest fraction p. The body sums are
/// wealth-weighted, sum of w_i n(w_i) / total, so the closed forms agree
/// with the integral definition of the share.
inline ShareResult top_share(const CompositeModel& model, double p) {
  if (!(model.tail.alpha > 1.0))
    throw infinite_mean_error("shares require alpha > 1");
  const Percentile pct = percentile(model, p);
  const double denominator = model.mean_wealth();

  double numerator;
  if (pct.branch == ShareBranch::pareto) {
    numerator = partial_mean(model.tail, pct.w_p);
  } else {
    double body = 0.0;
    for (std::size_t i = 0; i < model.body_values.size(); ++i)
      if (model.body_values[i] >= pct.w_p)
        body += model.body_values[i] * model.body_weights[i];
    numerator = body / model.total + partial_mean(model.tail, model.tail.w0);
  }
  return {p, pct.w_p, numerator / denominator, pct.branch};
}

}  // namespace wealthtail

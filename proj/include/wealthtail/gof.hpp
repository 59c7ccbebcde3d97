#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wealthtail/errors.hpp"
#include "wealthtail/estimators.hpp"
#include "wealthtail/parallel.hpp"
#include "wealthtail/weighted_sample.hpp"

namespace wealthtail {

enum class GofCriterion { ks, cm };

inline std::string_view to_string(GofCriterion criterion) {
  return criterion == GofCriterion::ks ? "ks" : "cm";
}

inline GofCriterion gof_criterion_from_string(std::string_view name) {
  if (name == "ks") return GofCriterion::ks;
  if (name == "cm") return GofCriterion::cm;
  throw configuration_error("unknown goodness-of-fit criterion '" +
                            std::string(name) + "'");
}

struct GofResult {
  GofCriterion criterion = GofCriterion::ks;
  double value = 0.0;
  double w_min = 0.0;
  double alpha = 0.0;
};

/// Kolmogorov-Smirnov distance between the fitted and the empirical tail
/// CCDF, evaluated at the data points:
/// max_i |(w_i/w_min)^{-alpha} - N(w_i)/N(w_min)|.
inline GofResult ks_stat(const TailView& tail, double alpha) {
  if (tail.size() == 0) throw degenerate_tail_error("empty tail");
  const double log_wmin = std::log(tail.w_min);
  double worst = 0.0;
  for (std::size_t i = 0; i < tail.size(); ++i) {
    const double fitted =
        std::exp(-alpha * (std::log(tail.values[i]) - log_wmin));
    const double empirical = tail.counts[i] / tail.total;
    worst = std::max(worst, std::abs(fitted - empirical));
  }
  return {GofCriterion::ks, worst, tail.w_min, alpha};
}

/// Cramer-von Mises criterion: trapezoidal sum over consecutive tail values
/// of g(w) = ((w/w_min)^{-alpha} - N(w)/N(w_min))^2 * w^{-(alpha+1)}.
/// The sum runs over the k-1 existing pairs; there is no term beyond the
/// largest value.
inline GofResult cm_stat(const TailView& tail, double alpha) {
  if (tail.size() < 2)
    throw insufficient_data_error("CM criterion needs at least 2 tail values");
  const double log_wmin = std::log(tail.w_min);
  const auto g = [&](std::size_t i) {
    const double log_w = std::log(tail.values[i]);
    const double fitted = std::exp(-alpha * (log_w - log_wmin));
    const double diff = fitted - tail.counts[i] / tail.total;
    return diff * diff * std::exp(-(alpha + 1.0) * log_w);
  };
  double sum = 0.0;
  double g_prev = g(0);
  for (std::size_t i = 1; i < tail.size(); ++i) {
    const double g_here = g(i);
    sum += (tail.values[i] - tail.values[i - 1]) * 0.5 * (g_prev + g_here);
    g_prev = g_here;
  }
  return {GofCriterion::cm, sum, tail.w_min, alpha};
}

inline GofResult gof_stat(const TailView& tail, double alpha,
                          GofCriterion criterion) {
  return criterion == GofCriterion::ks ? ks_stat(tail, alpha)
                                       : cm_stat(tail, alpha);
}

struct WminSearchOptions {
  /// Candidate range; defaults to [weighted median, second-largest value].
  std::optional<double> lo;
  std::optional<double> hi;
  /// Minimum number of candidates the range must contain.
  std::size_t min_candidates = 10;
  /// Keep at most this many candidates, thinning evenly (0 = keep all).
  std::size_t max_candidates = 0;
  unsigned threads = 1;
};

struct WminSelection {
  double w_min = 0.0;
  AlphaEstimate alpha;
  GofResult gof;
  std::size_t n_candidates = 0;
};

/// Scans the observed distinct values in the search range, fits alpha above
/// each candidate with the chosen estimator, and returns the candidate with
/// the smallest criterion value. Ties break toward the smallest w_min.
/// Candidates where the estimator degenerates are skipped.
inline WminSelection select_wmin(const WeightedSample& sample,
                                 AlphaMethod method, GofCriterion criterion,
                                 const WminSearchOptions& options = {}) {
  const auto& values = sample.values();
  double lo = options.lo ? *options.lo : sample.weighted_median();
  double hi;
  if (options.hi) {
    hi = *options.hi;
  } else {
    if (values.size() < 2)
      throw configuration_error("sample too small for a w_min search");
    hi = values[values.size() - 2];  // second-largest distinct value
  }

  std::vector<double> candidates;
  for (double v : values)
    if (v >= lo && v <= hi) candidates.push_back(v);
  if (candidates.empty())
    throw configuration_error("no w_min candidates in the search range");
  if (candidates.size() < options.min_candidates)
    throw configuration_error(
        "w_min search range holds " + std::to_string(candidates.size()) +
        " candidates, fewer than the floor of " +
        std::to_string(options.min_candidates));
  if (options.max_candidates > 0 && candidates.size() > options.max_candidates) {
    std::vector<double> thinned;
    const std::size_t keep = options.max_candidates;
    thinned.reserve(keep);
    for (std::size_t j = 0; j < keep; ++j)
      thinned.push_back(candidates[j * (candidates.size() - 1) / (keep - 1)]);
    thinned.erase(std::unique(thinned.begin(), thinned.end()), thinned.end());
    candidates = std::move(thinned);
  }

  struct Entry {
    bool ok = false;
    AlphaEstimate alpha;
    GofResult gof;
  };
  std::vector<Entry> entries(candidates.size());
  parallel_for(candidates.size(), options.threads, [&](std::size_t i) {
    try {
      TailView tail = tail_view(sample, candidates[i]);
      Entry entry;
      entry.alpha = estimate_alpha(tail, method);
      entry.gof = gof_stat(tail, entry.alpha.alpha, criterion);
      entry.ok = true;
      entries[i] = entry;
    } catch (const error&) {
      // degenerate candidate; skipped
    }
  });

  std::size_t best = entries.size();
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (!entries[i].ok) continue;
    if (best == entries.size() || entries[i].gof.value < entries[best].gof.value)
      best = i;
  }
  if (best == entries.size())
    throw configuration_error("no usable w_min candidate in the search range");
  return {candidates[best], entries[best].alpha, entries[best].gof,
          candidates.size()};
}

}  // namespace wealthtail

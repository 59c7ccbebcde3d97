#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "wealthtail/errors.hpp"
#include "wealthtail/numeric.hpp"

namespace wealthtail {

/// One row of a raw survey table before aggregation.
struct RawRow {
  double wealth = 0.0;
  double weight = 1.0;
};
using RawTable = std::vector<RawRow>;

/// Wealth values with household weights, aggregated so that values are
/// strictly increasing. A value observed several times is one (w_i, n(w_i))
/// pair with summed weight; every formula downstream depends only on these
/// pairs. Immutable after construction.
class WeightedSample {
 public:
  WeightedSample(std::vector<double> values, std::vector<double> weights,
                 bool combined_sources = false)
      : combined_(combined_sources) {
    if (values.size() != weights.size())
      throw validation_error("values and weights differ in length");
    if (values.empty()) throw validation_error("empty sample");
    for (double n : weights) {
      if (!(n > 0.0) || !std::isfinite(n))
        throw validation_error("weights must be positive and finite");
    }
    for (double w : values) {
      if (!std::isfinite(w)) throw validation_error("wealth must be finite");
    }

    std::vector<std::size_t> order(values.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

    values_.reserve(values.size());
    weights_.reserve(values.size());
    for (std::size_t idx : order) {
      if (!values_.empty() && values[idx] == values_.back()) {
        weights_.back() += weights[idx];
      } else {
        values_.push_back(values[idx]);
        weights_.push_back(weights[idx]);
      }
    }
    for (double n : weights_) total_ += n;
  }

  static WeightedSample from_rows(const RawTable& rows,
                                  bool combined_sources = false) {
    std::vector<double> values, weights;
    values.reserve(rows.size());
    weights.reserve(rows.size());
    for (const RawRow& row : rows) {
      values.push_back(row.wealth);
      weights.push_back(row.weight);
    }
    return WeightedSample(std::move(values), std::move(weights), combined_sources);
  }

  const std::vector<double>& values() const { return values_; }
  const std::vector<double>& weights() const { return weights_; }
  double total_weight() const { return total_; }
  std::size_t size() const { return values_.size(); }
  double min_value() const { return values_.front(); }
  double max_value() const { return values_.back(); }

  /// True when the sample was assembled from survey plus rich-list data;
  /// CCDF-based estimators carry a warning on such samples.
  bool combined_sources() const { return combined_; }

  double weighted_median() const {
    return wealthtail::weighted_median(values_, weights_, total_);
  }

 private:
  std::vector<double> values_;
  std::vector<double> weights_;
  double total_ = 0.0;
  bool combined_ = false;
};

/// Restriction of a sample to values >= w_min together with the cumulative
/// tail counts N(w_i) = sum of n(w_j) over w_j >= w_i (inclusive comparison
/// throughout).
struct TailView {
  std::vector<double> values;   // ascending, all >= w_min
  std::vector<double> weights;  // n(w_i)
  std::vector<double> counts;   // N(w_i), non-increasing
  double w_min = 0.0;
  double total = 0.0;  // N(w_min) == counts.front()
  bool combined = false;

  std::size_t size() const { return values.size(); }
};

inline TailView tail_view(const WeightedSample& sample, double w_min) {
  const auto& values = sample.values();
  const auto first =
      std::lower_bound(values.begin(), values.end(), w_min) - values.begin();
  if (static_cast<std::size_t>(first) == values.size())
    throw degenerate_tail_error("no data at or above w_min");

  TailView tail;
  tail.w_min = w_min;
  tail.combined = sample.combined_sources();
  tail.values.assign(values.begin() + first, values.end());
  tail.weights.assign(sample.weights().begin() + first, sample.weights().end());
  tail.counts.resize(tail.values.size());
  double cum = 0.0;
  for (std::size_t i = tail.values.size(); i-- > 0;) {
    cum += tail.weights[i];
    tail.counts[i] = cum;
  }
  tail.total = cum;
  return tail;
}

/// The five complete data sets produced by multiple imputation, plus the
/// per-household average.
struct ImplicateSet {
  std::vector<WeightedSample> implicates;  // size 5
  WeightedSample averaged;
};

constexpr std::size_t implicate_count = 5;

/// Builds the averaged sample from five aligned raw tables (same households
/// in the same row order, identical weights).
inline ImplicateSet average_implicates(const std::vector<RawTable>& tables) {
  if (tables.size() != implicate_count)
    throw alignment_error("expected 5 implicate tables, got " +
                          std::to_string(tables.size()));
  const std::size_t rows = tables.front().size();
  for (const RawTable& table : tables) {
    if (table.size() != rows)
      throw alignment_error("implicate tables differ in household count");
  }
  RawTable averaged(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    const double weight = tables.front()[r].weight;
    double sum = 0.0;
    for (const RawTable& table : tables) {
      if (table[r].weight != weight)
        throw alignment_error("household weights differ across implicates");
      sum += table[r].wealth;
    }
    averaged[r] = RawRow{sum / static_cast<double>(implicate_count), weight};
  }

  ImplicateSet set{{}, WeightedSample::from_rows(averaged)};
  set.implicates.reserve(implicate_count);
  for (const RawTable& table : tables)
    set.implicates.push_back(WeightedSample::from_rows(table));
  return set;
}

/// One line of a rich list: an estimated family wealth and the number of
/// households it stands for.
struct RichEntry {
  double wealth = 0.0;
  double households = 1.0;
};

/// Externally compiled roster of the wealthiest households. `w1_count` is
/// the lowest wealth at which the list is considered complete; entries below
/// it are ignored. `w1_scale` is the value used inside w1^alpha factors; the
/// conservative convention counts at the nominal threshold but scales at the
/// midpoint to the next lower reported wealth.
class RichList {
 public:
  RichList(std::vector<RichEntry> entries, double w1_count, double w1_scale)
      : entries_(std::move(entries)), w1_count_(w1_count), w1_scale_(w1_scale) {
    for (const RichEntry& e : entries_) {
      if (!(e.wealth > 0.0)) throw validation_error("rich-list wealth must be positive");
      if (!(e.households > 0.0) || e.households != std::floor(e.households))
        throw validation_error("rich-list household count must be a positive integer");
    }
    std::sort(entries_.begin(), entries_.end(),
              [](const RichEntry& a, const RichEntry& b) { return a.wealth > b.wealth; });
    if (!(w1_count_ > 0.0) || !(w1_scale_ > 0.0))
      throw validation_error("rich-list thresholds must be positive");
    if (w1_scale_ > w1_count_)
      throw validation_error("w1_scale must not exceed w1_count");
  }

  const std::vector<RichEntry>& entries() const { return entries_; }
  double w1_count() const { return w1_count_; }
  double w1_scale() const { return w1_scale_; }

  /// N~(w1): households with wealth at or above the counting threshold.
  double count_at_w1() const {
    double count = 0.0;
    for (const RichEntry& e : entries_)
      if (e.wealth >= w1_count_) count += e.households;
    return count;
  }

  std::vector<RichEntry> usable_entries() const {
    std::vector<RichEntry> out;
    for (const RichEntry& e : entries_)
      if (e.wealth >= w1_count_) out.push_back(e);
    return out;
  }

 private:
  std::vector<RichEntry> entries_;  // descending by wealth
  double w1_count_;
  double w1_scale_;
};

/// Concatenates a survey tail with the usable part of a rich list into one
/// weighted sample. The sources must not overlap; a gap between them is fine
/// (only the maximum-likelihood estimator is valid across the gap, and
/// estimates on such samples carry a warning).
inline WeightedSample combine_survey_richlist(const TailView& survey,
                                              const RichList& rich) {
  std::vector<double> values(survey.values);
  std::vector<double> weights(survey.weights);
  const auto usable = rich.usable_entries();
  if (usable.empty()) return WeightedSample(std::move(values), std::move(weights));

  double rich_min = usable.front().wealth;
  for (const RichEntry& e : usable) rich_min = std::min(rich_min, e.wealth);
  if (rich_min < survey.values.back())
    throw configuration_error(
        "rich list overlaps the survey range; sources must be disjoint");

  for (const RichEntry& e : usable) {
    values.push_back(e.wealth);
    weights.push_back(e.households);
  }
  return WeightedSample(std::move(values), std::move(weights), true);
}

}  // namespace wealthtail

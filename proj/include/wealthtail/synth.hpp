#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "wealthtail/errors.hpp"
#include "wealthtail/rng.hpp"
#include "wealthtail/weighted_sample.hpp"

namespace wealthtail {

/// Settings for the bundled survey generator. It produces files shaped like
/// wealth-survey extracts (lognormal body below the tail start, Pareto tail
/// above, calibrated real-valued weights, optionally five implicates with
/// imputation noise and a top-coding bound) so the whole pipeline can run on
/// shareable data.
struct SynthConfig {
  std::size_t rows = 5000;
  double alpha = 1.5;
  double tail_start = 1e6;
  double tail_fraction = 0.05;
  double body_median = 150e3;
  double body_log_sd = 1.0;
  // calibrated household weights; survey rows stand for ~1000 households each
  double weight_low = 500.0;
  double weight_high = 1500.0;
  unsigned n_implicates = 0;  // 0 = single table, otherwise 5
  double imputed_fraction = 0.0;
  double implicate_log_sd = 0.05;
  std::optional<double> top_code;  // tail draws above this bound are redrawn
  std::uint64_t seed = 0;

  void validate() const {
    if (rows == 0) throw configuration_error("rows must be positive");
    if (!(alpha > 0.0)) throw configuration_error("alpha must be positive");
    if (!(tail_start > 0.0)) throw configuration_error("tail_start must be positive");
    if (!(tail_fraction >= 0.0) || !(tail_fraction < 1.0))
      throw configuration_error("tail_fraction must lie in [0, 1)");
    if (!(weight_low > 0.0) || weight_high < weight_low)
      throw configuration_error("invalid weight range");
    if (n_implicates != 0 && n_implicates != 5)
      throw configuration_error("implicate count must be 0 or 5");
    if (top_code && !(*top_code > tail_start))
      throw configuration_error("top_code must exceed tail_start");
  }
};

/// Generates one table (or five aligned implicate tables) of survey rows.
inline std::vector<RawTable> synth_survey(const SynthConfig& config) {
  config.validate();
  Rng rng(stream_seed(config.seed, 0));
  const std::size_t tables = config.n_implicates == 0 ? 1 : config.n_implicates;
  std::vector<RawTable> out(tables, RawTable(config.rows));
  const double log_median = std::log(config.body_median);

  for (std::size_t r = 0; r < config.rows; ++r) {
    const double weight = rng.uniform(config.weight_low, config.weight_high);
    const bool in_tail = rng.uniform01() < config.tail_fraction;
    double wealth;
    if (in_tail) {
      do {
        wealth = config.tail_start *
                 std::exp(-std::log(rng.uniform_open_closed()) / config.alpha);
      } while (config.top_code && wealth > *config.top_code);
    } else {
      do {
        wealth = std::exp(log_median + config.body_log_sd * rng.normal());
      } while (wealth > config.tail_start);
    }
    const bool imputed =
        tables > 1 && rng.uniform01() < config.imputed_fraction;
    for (std::size_t t = 0; t < tables; ++t) {
      double w = wealth;
      if (imputed) w *= std::exp(config.implicate_log_sd * rng.normal());
      out[t][r] = RawRow{w, weight};
    }
  }
  return out;
}

/// A rich list consistent with a Pareto tail above w1: entry r sits near the
/// r-th largest of `entries` expected draws, rounded to three significant
/// digits the way published lists round, with occasional multi-household
/// families.
inline RichList synth_richlist(double alpha, double w1, std::size_t entries,
                               std::uint64_t seed) {
  if (entries < 2)
    throw configuration_error("rich list needs at least 2 entries");
  std::vector<RichEntry> list;
  list.reserve(entries);
  for (std::size_t r = 1; r <= entries; ++r) {
    const double raw =
        w1 * std::exp(std::log(static_cast<double>(entries) /
                               static_cast<double>(r)) /
                      alpha);
    const double digits = std::pow(10.0, std::floor(std::log10(raw)) - 2.0);
    const double wealth = std::round(raw / digits) * digits;
    const double households =
        1.0 + static_cast<double>(splitmix64(seed ^ r) % 4 == 0);
    list.push_back(RichEntry{wealth, households});
  }
  return RichList(std::move(list), w1, w1);
}

}  // namespace wealthtail

#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "wealthtail/errors.hpp"
#include "wealthtail/estimators.hpp"
#include "wealthtail/gof.hpp"
#include "wealthtail/parallel.hpp"
#include "wealthtail/pareto.hpp"
#include "wealthtail/rng.hpp"
#include "wealthtail/weighted_sample.hpp"

namespace wealthtail {

/// Monte Carlo benchmark settings. The defaults reproduce the baseline
/// study: 5000 draws from Pareto(1.5) above 0.5 Mio, 1000 repetitions,
/// with optional cutoff (rejected values are redrawn so every replication
/// keeps its full size) and optional cell weighting.
struct SimConfig {
  double alpha_true = 1.5;
  double w_min_gen = 0.5e6;
  std::size_t n_samples = 5000;
  std::size_t n_reps = 1000;
  std::optional<double> cutoff;  // e.g. 75e6
  bool weighted = false;
  /// Under cutoff + weighted, renormalize cell masses to the accepted
  /// region so weights sum to n_samples; off for sensitivity analysis.
  bool renormalize_cell_mass = true;
  /// Re-select w_min per replication by goodness of fit instead of fixing
  /// it at w_min_gen (off by default; the study evaluates at the generator
  /// threshold).
  bool reselect_wmin = false;
  std::uint64_t seed = 0;
  unsigned threads = 1;

  void validate() const {
    if (n_samples < 2) throw configuration_error("n_samples must be >= 2");
    if (n_reps < 1) throw configuration_error("n_reps must be >= 1");
    if (!(alpha_true > 0.0)) throw configuration_error("alpha_true must be positive");
    if (!(w_min_gen > 0.0)) throw configuration_error("w_min_gen must be positive");
    if (cutoff && !(*cutoff > w_min_gen))
      throw configuration_error("cutoff must exceed w_min_gen");
  }
};

/// One replication: n_samples accepted draws, either with unit weights or
/// with weights equal to n_samples times the true probability mass of the
/// cell around each draw. Cells are bounded by the midpoints of consecutive
/// order statistics, with w_min_gen below and infinity (or the cutoff)
/// above.
inline WeightedSample draw_replication(const SimConfig& config,
                                       std::size_t rep_index) {
  config.validate();
  Rng rng(stream_seed(config.seed, rep_index));
  std::vector<double> draws(config.n_samples);
  for (double& w : draws) {
    do {
      w = pareto_draw(rng, config.alpha_true, config.w_min_gen);
    } while (config.cutoff && w > *config.cutoff);
  }

  if (!config.weighted) {
    return WeightedSample(std::move(draws),
                          std::vector<double>(config.n_samples, 1.0));
  }

  std::sort(draws.begin(), draws.end());
  draws.erase(std::unique(draws.begin(), draws.end()), draws.end());
  const std::size_t k = draws.size();
  const double alpha = config.alpha_true;
  const auto ccdf = [&](double w) {
    return std::exp(-alpha * std::log(w / config.w_min_gen));
  };

  double accepted_mass = 1.0;
  if (config.cutoff && config.renormalize_cell_mass)
    accepted_mass = 1.0 - ccdf(*config.cutoff);

  std::vector<double> weights(k);
  double upper_ccdf = 1.0;  // CCDF at the lower cell boundary
  const double scale = static_cast<double>(config.n_samples) / accepted_mass;
  for (std::size_t i = 0; i < k; ++i) {
    double lower_ccdf;
    if (i + 1 < k) {
      lower_ccdf = ccdf(0.5 * (draws[i] + draws[i + 1]));
    } else {
      lower_ccdf = config.cutoff ? ccdf(*config.cutoff) : 0.0;
    }
    weights[i] = (upper_ccdf - lower_ccdf) * scale;
    upper_ccdf = lower_ccdf;
  }
  return WeightedSample(std::move(draws), std::move(weights));
}

struct EstimatorStats {
  double mean = 0.0;
  double sd = 0.0;   // sample standard deviation over replications
  double mse = 0.0;  // bias^2 + sd^2
  double mean_ks = 0.0;
  double mean_cm = 0.0;
  std::size_t failures = 0;
};

struct SimReport {
  static constexpr std::array<AlphaMethod, 4> methods = {
      AlphaMethod::ml, AlphaMethod::reg, AlphaMethod::reg_intercept,
      AlphaMethod::wijk};
  SimConfig config;
  std::array<EstimatorStats, 4> stats;

  const EstimatorStats& of(AlphaMethod method) const {
    for (std::size_t m = 0; m < methods.size(); ++m)
      if (methods[m] == method) return stats[m];
    throw configuration_error("unknown estimator");
  }
};

/// Runs the full study: every replication is drawn from its own RNG stream,
/// all four estimators are fitted at w_min, and KS/CM are computed for each
/// fit. Replications run in parallel; the aggregation is a fixed-order
/// reduction, so the report is identical for any thread count.
inline SimReport run_study(const SimConfig& config) {
  config.validate();
  struct RepResult {
    std::array<double, 4> alpha{};
    std::array<double, 4> ks{};
    std::array<double, 4> cm{};
    std::array<bool, 4> ok{};
  };
  std::vector<RepResult> results(config.n_reps);

  parallel_for(config.n_reps, config.threads, [&](std::size_t rep) {
    const WeightedSample sample = draw_replication(config, rep);
    RepResult& out = results[rep];
    for (std::size_t m = 0; m < SimReport::methods.size(); ++m) {
      try {
        TailView tail = tail_view(sample, config.w_min_gen);
        AlphaEstimate estimate;
        if (config.reselect_wmin) {
          WminSearchOptions search;
          search.lo = config.w_min_gen;
          search.max_candidates = 200;
          const auto selection =
              select_wmin(sample, SimReport::methods[m], GofCriterion::ks, search);
          tail = tail_view(sample, selection.w_min);
          estimate = selection.alpha;
        } else {
          estimate = estimate_alpha(tail, SimReport::methods[m]);
        }
        out.alpha[m] = estimate.alpha;
        out.ks[m] = ks_stat(tail, estimate.alpha).value;
        out.cm[m] = cm_stat(tail, estimate.alpha).value;
        out.ok[m] = true;
      } catch (const error&) {
        out.ok[m] = false;
      }
    }
  });

  SimReport report{config, {}};
  for (std::size_t m = 0; m < SimReport::methods.size(); ++m) {
    EstimatorStats& stats = report.stats[m];
    std::size_t used = 0;
    double sum = 0.0, sum_ks = 0.0, sum_cm = 0.0;
    for (const RepResult& r : results) {
      if (!r.ok[m]) {
        ++stats.failures;
        continue;
      }
      ++used;
      sum += r.alpha[m];
      sum_ks += r.ks[m];
      sum_cm += r.cm[m];
    }
    if (used == 0) continue;
    stats.mean = sum / static_cast<double>(used);
    stats.mean_ks = sum_ks / static_cast<double>(used);
    stats.mean_cm = sum_cm / static_cast<double>(used);
    double ss = 0.0;
    for (const RepResult& r : results) {
      if (!r.ok[m]) continue;
      const double d = r.alpha[m] - stats.mean;
      ss += d * d;
    }
    const double variance =
        used > 1 ? ss / static_cast<double>(used - 1) : 0.0;
    stats.sd = std::sqrt(variance);
    const double bias = stats.mean - config.alpha_true;
    stats.mse = bias * bias + variance;
  }
  return report;
}

}  // namespace wealthtail

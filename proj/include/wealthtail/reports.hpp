#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "wealthtail/composite.hpp"
#include "wealthtail/csv.hpp"
#include "wealthtail/density.hpp"
#include "wealthtail/estimators.hpp"
#include "wealthtail/gof.hpp"
#include "wealthtail/manifest.hpp"
#include "wealthtail/simulation.hpp"
#include "wealthtail/weighted_sample.hpp"

namespace wealthtail {

namespace detail {

inline std::string csv_manifest_line(const RunManifest& manifest) {
  return "# manifest " + manifest.to_json().dump() + "\n";
}

inline std::string opt_field(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

struct ItemInput {
  std::string label;
  const WeightedSample* sample;
};

/// Per-implicate work list: the five implicates followed by the averaged
/// sample, or the single sample alone.
inline std::vector<ItemInput> survey_items(const SurveyData& survey) {
  std::vector<ItemInput> items;
  if (survey.has_implicates()) {
    const auto& set = *survey.implicate_set;
    for (std::size_t i = 0; i < set.implicates.size(); ++i)
      items.push_back({"implicate-" + std::to_string(i + 1), &set.implicates[i]});
    items.push_back({"averaged", &set.averaged});
  } else {
    items.push_back({"sample", &survey.sample});
  }
  return items;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// fit
// ---------------------------------------------------------------------------

struct FitOptions {
  AlphaMethod method = AlphaMethod::ml;
  GofCriterion criterion = GofCriterion::ks;
  std::optional<double> fixed_wmin;
  std::optional<double> range_lo;
  std::optional<double> range_hi;
  unsigned threads = 1;
};

struct FitItem {
  std::string label;
  bool ok = false;
  std::string message;
  double w_min = 0.0;
  double alpha = 0.0;
  double gof = 0.0;
  double tail_count = 0.0;
  bool combined_warning = false;
  std::optional<double> alpha_combined;  // ML on survey tail + rich list
};

struct FitReport {
  RunManifest manifest;
  AlphaMethod method = AlphaMethod::ml;
  GofCriterion criterion = GofCriterion::ks;
  std::vector<FitItem> items;

  bool complete() const {
    return std::all_of(items.begin(), items.end(),
                       [](const FitItem& i) { return i.ok; });
  }
};

inline FitReport run_fit(const SurveyData& survey, const RichList* rich,
                         const FitOptions& options, RunManifest manifest) {
  FitReport report;
  report.method = options.method;
  report.criterion = options.criterion;
  report.manifest = std::move(manifest);

  for (const auto& input : detail::survey_items(survey)) {
    FitItem item;
    item.label = input.label;
    try {
      AlphaEstimate estimate;
      GofResult gof;
      if (options.fixed_wmin) {
        const TailView tail = tail_view(*input.sample, *options.fixed_wmin);
        estimate = estimate_alpha(tail, options.method);
        gof = gof_stat(tail, estimate.alpha, options.criterion);
      } else {
        WminSearchOptions search;
        search.lo = options.range_lo;
        search.hi = options.range_hi;
        search.threads = options.threads;
        const auto selection =
            select_wmin(*input.sample, options.method, options.criterion, search);
        estimate = selection.alpha;
        gof = selection.gof;
      }
      item.w_min = estimate.w_min;
      item.alpha = estimate.alpha;
      item.gof = gof.value;
      item.tail_count = estimate.tail_count;
      item.combined_warning = estimate.combined_warning;
      if (rich != nullptr) {
        const auto combined = combine_survey_richlist(
            tail_view(*input.sample, estimate.w_min), *rich);
        item.alpha_combined =
            alpha_ml(tail_view(combined, estimate.w_min)).alpha;
      }
      item.ok = true;
    } catch (const std::exception& e) {
      item.ok = false;
      item.message = e.what();
    }
    report.items.push_back(std::move(item));
  }
  return report;
}

inline json to_json(const FitReport& report) {
  json j;
  j["manifest"] = report.manifest.to_json();
  j["estimator"] = std::string(to_string(report.method));
  j["criterion"] = std::string(to_string(report.criterion));
  json items = json::array();
  for (const FitItem& item : report.items) {
    json row;
    row["item"] = item.label;
    row["status"] = item.ok ? "ok" : "failed";
    if (!item.ok) {
      row["message"] = item.message;
    } else {
      row["w_min"] = item.w_min;
      row["alpha"] = item.alpha;
      row["gof"] = item.gof;
      row["tail_count"] = item.tail_count;
      row["combined_warning"] = item.combined_warning;
      if (item.alpha_combined) row["alpha_combined"] = *item.alpha_combined;
    }
    items.push_back(std::move(row));
  }
  j["items"] = std::move(items);
  j["complete"] = report.complete();
  return j;
}

inline std::string to_csv(const FitReport& report) {
  std::string out = detail::csv_manifest_line(report.manifest);
  out += "item,status,estimator,criterion,w_min,alpha,gof,tail_count,"
         "alpha_combined,combined_warning\n";
  for (const FitItem& item : report.items) {
    out += item.label;
    out += item.ok ? ",ok," : ",failed,";
    out += std::string(to_string(report.method)) + "," +
           std::string(to_string(report.criterion)) + ",";
    if (item.ok) {
      out += format_double(item.w_min) + "," + format_double(item.alpha) + "," +
             format_double(item.gof) + "," + format_double(item.tail_count) +
             "," + detail::opt_field(item.alpha_combined) + "," +
             (item.combined_warning ? "1" : "0");
    } else {
      out += ",,,,,";
    }
    out += "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// share
// ---------------------------------------------------------------------------

struct ShareOptions {
  AlphaMethod method = AlphaMethod::ml;
  GofCriterion criterion = GofCriterion::ks;
  Normalization normalization = Normalization::bach;
  std::vector<double> p_values = {0.01, 0.05, 0.10};
  std::optional<double> fixed_wmin;
  std::optional<double> range_lo;
  std::optional<double> range_hi;
  std::optional<double> fixed_w0;
  std::optional<double> w_max;
  bool w_max_from_richlist = false;
  std::optional<double> bandwidth;
  unsigned threads = 1;
};

struct ShareItem {
  std::string label;
  bool ok = false;
  std::string message;
  double w_min = 0.0;
  double alpha = 0.0;
  double w0 = 0.0;
  double bandwidth = 0.0;
  std::optional<double> beta_prime;
  std::vector<ShareResult> shares;  // one per requested p
};

struct ShareReport {
  RunManifest manifest;
  Normalization normalization = Normalization::bach;
  std::optional<double> w_max;
  std::vector<ShareItem> items;

  struct Aggregate {
    double p = 0.0;
    double avg = 0.0;  // share of the averaged (or single) sample
    double min = 0.0;
    double max = 0.0;
  };
  std::vector<Aggregate> aggregates;

  bool complete() const {
    return std::all_of(items.begin(), items.end(),
                       [](const ShareItem& i) { return i.ok; });
  }
};

inline ShareReport run_share(const SurveyData& survey, const RichList* rich,
                             const ShareOptions& options, RunManifest manifest) {
  if (options.normalization == Normalization::richlist && rich == nullptr)
    throw configuration_error("rich-list normalization needs --richlist");
  if (options.w_max_from_richlist && rich == nullptr)
    throw configuration_error("w_max estimation needs --richlist");
  for (double p : options.p_values)
    if (!(p > 0.0) || !(p < 1.0))
      throw configuration_error("p values must lie in (0, 1)");

  ShareReport report;
  report.manifest = std::move(manifest);
  report.normalization = options.normalization;
  if (options.w_max) {
    report.w_max = options.w_max;
  } else if (options.w_max_from_richlist) {
    report.w_max = estimate_wmax(*rich);
  }

  for (const auto& input : detail::survey_items(survey)) {
    ShareItem item;
    item.label = input.label;
    try {
      const WeightedSample& sample = *input.sample;

      AlphaEstimate estimate;
      if (options.fixed_wmin) {
        estimate =
            estimate_alpha(tail_view(sample, *options.fixed_wmin), options.method);
      } else {
        WminSearchOptions search;
        search.lo = options.range_lo;
        search.hi = options.range_hi;
        search.threads = options.threads;
        estimate =
            select_wmin(sample, options.method, options.criterion, search).alpha;
      }
      item.w_min = estimate.w_min;
      item.alpha = estimate.alpha;
      // with a rich list the exponent is refined on the combined data
      // (valid for the ML estimator only)
      if (rich != nullptr && options.method == AlphaMethod::ml) {
        const auto combined =
            combine_survey_richlist(tail_view(sample, item.w_min), *rich);
        item.alpha = alpha_ml(tail_view(combined, item.w_min)).alpha;
      }

      double w0;
      if (options.fixed_w0) {
        w0 = *options.fixed_w0;
        item.bandwidth = options.bandwidth.value_or(0.0);
      } else {
        item.bandwidth = options.bandwidth
                             ? *options.bandwidth
                             : select_bandwidth(sample, item.w_min).value;
        const KernelDensity kde = kernel_density(sample, item.bandwidth);
        w0 = solve_w0(sample, item.alpha, item.w_min, options.normalization,
                      kde, rich);
      }
      item.w0 = w0;

      CompositeModel model = [&] {
        switch (options.normalization) {
          case Normalization::bach:
            return normalize_bach(sample, item.alpha, w0, report.w_max);
          case Normalization::eckerstorfer:
            return normalize_eckerstorfer(sample, item.alpha, item.w_min, w0,
                                          report.w_max);
          case Normalization::richlist:
          default:
            return normalize_richlist(sample, *rich, item.alpha, w0,
                                      report.w_max);
        }
      }();
      item.beta_prime = model.beta_prime;
      for (double p : options.p_values) item.shares.push_back(top_share(model, p));
      item.ok = true;
    } catch (const std::exception& e) {
      item.ok = false;
      item.message = e.what();
    }
    report.items.push_back(std::move(item));
  }

  for (std::size_t pi = 0; pi < options.p_values.size(); ++pi) {
    ShareReport::Aggregate agg;
    agg.p = options.p_values[pi];
    bool any = false;
    for (const ShareItem& item : report.items) {
      if (!item.ok) continue;
      const double s = item.shares[pi].share;
      if (item.label == "averaged" || item.label == "sample") agg.avg = s;
      if (!any || s < agg.min) agg.min = s;
      if (!any || s > agg.max) agg.max = s;
      any = true;
    }
    if (any) report.aggregates.push_back(agg);
  }
  return report;
}

inline json to_json(const ShareReport& report) {
  json j;
  j["manifest"] = report.manifest.to_json();
  j["normalization"] = std::string(to_string(report.normalization));
  if (report.w_max) j["w_max"] = *report.w_max;
  json items = json::array();
  for (const ShareItem& item : report.items) {
    json row;
    row["item"] = item.label;
    row["status"] = item.ok ? "ok" : "failed";
    if (!item.ok) {
      row["message"] = item.message;
    } else {
      row["w_min"] = item.w_min;
      row["alpha"] = item.alpha;
      row["w0"] = item.w0;
      if (item.bandwidth > 0.0) row["bandwidth"] = item.bandwidth;
      if (item.beta_prime) row["beta_prime"] = *item.beta_prime;
      json shares = json::array();
      for (const ShareResult& s : item.shares) {
        shares.push_back(json{{"p", s.p},
                              {"w_p", s.w_p},
                              {"share", s.share},
                              {"branch", std::string(to_string(s.branch))}});
      }
      row["shares"] = std::move(shares);
    }
    items.push_back(std::move(row));
  }
  j["items"] = std::move(items);
  json aggregates = json::array();
  for (const auto& agg : report.aggregates)
    aggregates.push_back(json{
        {"p", agg.p}, {"avg", agg.avg}, {"min", agg.min}, {"max", agg.max}});
  j["aggregates"] = std::move(aggregates);
  j["complete"] = report.complete();
  return j;
}

inline std::string to_csv(const ShareReport& report) {
  std::string out = detail::csv_manifest_line(report.manifest);
  out += "item,status,normalization,w_min,alpha,w0,bandwidth,beta_prime,"
         "p,w_p,share,branch\n";
  const std::string norm(to_string(report.normalization));
  for (const ShareItem& item : report.items) {
    if (!item.ok) {
      out += item.label + ",failed," + norm + ",,,,,,,,,\n";
      continue;
    }
    for (const ShareResult& s : item.shares) {
      out += item.label + ",ok," + norm + "," + format_double(item.w_min) +
             "," + format_double(item.alpha) + "," + format_double(item.w0) +
             "," +
             (item.bandwidth > 0.0 ? format_double(item.bandwidth)
                                   : std::string()) +
             "," + detail::opt_field(item.beta_prime) + "," +
             format_double(s.p) + "," + format_double(s.w_p) + "," +
             format_double(s.share) + "," + std::string(to_string(s.branch)) +
             "\n";
    }
  }
  for (const auto& agg : report.aggregates) {
    for (const char* kind : {"min", "avg", "max"}) {
      const double v = kind == std::string("min")
                           ? agg.min
                           : (kind == std::string("avg") ? agg.avg : agg.max);
      out += std::string("summary-") + kind + ",ok," + norm + ",,,,,," +
             format_double(agg.p) + ",," + format_double(v) + ",\n";
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct SimulateOptions {
  SimConfig base;
  double cutoff_value = 75e6;
  /// Run the full 2x2 grid of cutoff/weighted variants; otherwise only the
  /// variant described by `base`.
  bool all_variants = true;
};

struct SimulateReport {
  RunManifest manifest;
  std::vector<SimReport> variants;
};

inline SimulateReport run_simulate(const SimulateOptions& options,
                                   RunManifest manifest) {
  SimulateReport report;
  report.manifest = std::move(manifest);
  if (options.all_variants) {
    for (const bool cutoff : {false, true}) {
      for (const bool weighted : {false, true}) {
        SimConfig config = options.base;
        config.cutoff = cutoff ? std::optional<double>(options.cutoff_value)
                               : std::nullopt;
        config.weighted = weighted;
        report.variants.push_back(run_study(config));
      }
    }
    // Table order: (no,no), (yes,no), (no,yes), (yes,yes)
    std::swap(report.variants[1], report.variants[2]);
  } else {
    report.variants.push_back(run_study(options.base));
  }
  return report;
}

inline json to_json(const SimulateReport& report) {
  json j;
  j["manifest"] = report.manifest.to_json();
  json variants = json::array();
  for (const SimReport& variant : report.variants) {
    json v;
    v["cutoff"] = variant.config.cutoff.has_value();
    if (variant.config.cutoff) v["cutoff_value"] = *variant.config.cutoff;
    v["weighted"] = variant.config.weighted;
    v["n_samples"] = variant.config.n_samples;
    v["n_reps"] = variant.config.n_reps;
    json estimators = json::array();
    for (std::size_t m = 0; m < SimReport::methods.size(); ++m) {
      const EstimatorStats& s = variant.stats[m];
      estimators.push_back(
          json{{"estimator", std::string(to_string(SimReport::methods[m]))},
               {"mean", s.mean},
               {"sd", s.sd},
               {"mse", s.mse},
               {"mean_ks", s.mean_ks},
               {"mean_cm", s.mean_cm},
               {"failures", s.failures}});
    }
    v["estimators"] = std::move(estimators);
    variants.push_back(std::move(v));
  }
  j["variants"] = std::move(variants);
  return j;
}

inline std::string to_csv(const SimulateReport& report) {
  std::string out = detail::csv_manifest_line(report.manifest);
  out += "cutoff,weighted,estimator,mean,sd,mse,mean_ks,mean_cm,failures\n";
  for (const SimReport& variant : report.variants) {
    for (std::size_t m = 0; m < SimReport::methods.size(); ++m) {
      const EstimatorStats& s = variant.stats[m];
      out += std::string(variant.config.cutoff ? "yes" : "no") + "," +
             (variant.config.weighted ? "yes" : "no") + "," +
             std::string(to_string(SimReport::methods[m])) + "," +
             format_double(s.mean) + "," + format_double(s.sd) + "," +
             format_double(s.mse) + "," + format_double(s.mean_ks) + "," +
             format_double(s.mean_cm) + "," + std::to_string(s.failures) + "\n";
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// wijk / density / w0 diagnostics
// ---------------------------------------------------------------------------

struct WijkOptions {
  std::vector<double> thresholds;     // empty = observed values, thinned
  std::size_t max_thresholds = 400;
};

struct WijkReport {
  RunManifest manifest;
  WijkCurve curve;
};

inline WijkReport run_wijk(const WeightedSample& sample,
                           const WijkOptions& options, RunManifest manifest) {
  std::vector<double> thresholds = options.thresholds;
  if (thresholds.empty()) {
    const auto& values = sample.values();
    if (values.size() < 2)
      throw configuration_error("sample too small for a ratio curve");
    thresholds.assign(values.begin(), values.end() - 1);
    if (options.max_thresholds > 0 &&
        thresholds.size() > options.max_thresholds) {
      std::vector<double> thinned;
      thinned.reserve(options.max_thresholds);
      for (std::size_t j = 0; j < options.max_thresholds; ++j)
        thinned.push_back(
            thresholds[j * (thresholds.size() - 1) / (options.max_thresholds - 1)]);
      thinned.erase(std::unique(thinned.begin(), thinned.end()), thinned.end());
      thresholds = std::move(thinned);
    }
  }
  return WijkReport{std::move(manifest), wijk_curve(sample, thresholds)};
}

inline json to_json(const WijkReport& report) {
  json j;
  j["manifest"] = report.manifest.to_json();
  json rows = json::array();
  for (std::size_t i = 0; i < report.curve.thresholds.size(); ++i) {
    json row;
    row["threshold"] = report.curve.thresholds[i];
    if (report.curve.ratios[i]) row["ratio"] = *report.curve.ratios[i];
    else row["ratio"] = nullptr;
    rows.push_back(std::move(row));
  }
  j["curve"] = std::move(rows);
  return j;
}

inline std::string to_csv(const WijkReport& report) {
  std::string out = detail::csv_manifest_line(report.manifest);
  out += "threshold,ratio\n";
  for (std::size_t i = 0; i < report.curve.thresholds.size(); ++i) {
    out += format_double(report.curve.thresholds[i]) + "," +
           detail::opt_field(report.curve.ratios[i]) + "\n";
  }
  return out;
}

struct DensityOptions {
  std::size_t grid_points = 512;
  std::optional<double> from;
  std::optional<double> to;
  std::optional<double> bandwidth;
  double bandwidth_floor = -std::numeric_limits<double>::infinity();
};

struct DensityReport {
  RunManifest manifest;
  double bandwidth = 0.0;
  bool bandwidth_fallback = false;
  std::vector<double> grid;
  std::vector<double> histogram;
  std::vector<double> kernel;
};

inline DensityReport run_density(const WeightedSample& sample,
                                 const DensityOptions& options,
                                 RunManifest manifest) {
  DensityReport report;
  report.manifest = std::move(manifest);
  if (options.bandwidth) {
    report.bandwidth = *options.bandwidth;
  } else {
    const Bandwidth bw = select_bandwidth(sample, options.bandwidth_floor);
    report.bandwidth = bw.value;
    report.bandwidth_fallback = bw.silverman_fallback;
  }
  const HistogramDensity hist = histogram_density(sample);
  const KernelDensity kde = kernel_density(sample, report.bandwidth);

  const double lo = options.from.value_or(sample.min_value());
  const double hi = options.to.value_or(sample.max_value());
  if (!(hi > lo)) throw configuration_error("empty density grid range");
  const std::size_t n = std::max<std::size_t>(options.grid_points, 2);
  report.grid.resize(n);
  report.histogram.resize(n);
  report.kernel.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double w =
        lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    report.grid[i] = w;
    report.histogram[i] = hist(w);
    report.kernel[i] = kde(w);
  }
  return report;
}

inline json to_json(const DensityReport& report) {
  json j;
  j["manifest"] = report.manifest.to_json();
  j["bandwidth"] = report.bandwidth;
  j["bandwidth_fallback"] = report.bandwidth_fallback;
  j["grid"] = report.grid;
  j["histogram"] = report.histogram;
  j["kernel"] = report.kernel;
  return j;
}

inline std::string to_csv(const DensityReport& report) {
  std::string out = detail::csv_manifest_line(report.manifest);
  out += "# bandwidth " + format_double(report.bandwidth) +
         (report.bandwidth_fallback ? " (silverman fallback)\n" : "\n");
  out += "w,histogram,kernel\n";
  for (std::size_t i = 0; i < report.grid.size(); ++i) {
    out += format_double(report.grid[i]) + "," +
           format_double(report.histogram[i]) + "," +
           format_double(report.kernel[i]) + "\n";
  }
  return out;
}

struct W0ReportOptions {
  AlphaMethod method = AlphaMethod::ml;
  GofCriterion criterion = GofCriterion::ks;
  Normalization normalization = Normalization::bach;
  std::optional<double> fixed_wmin;
  std::optional<double> fixed_alpha;
  std::optional<double> bandwidth;
  std::optional<double> range_lo;
  std::optional<double> range_hi;
  unsigned threads = 1;
};

struct W0Report {
  RunManifest manifest;
  double w_min = 0.0;
  double alpha = 0.0;
  double bandwidth = 0.0;
  double root = 0.0;
  W0Trace trace;
};

inline W0Report run_w0(const SurveyData& survey, const RichList* rich,
                       const W0ReportOptions& options, RunManifest manifest) {
  if (options.normalization == Normalization::richlist && rich == nullptr)
    throw configuration_error("rich-list normalization needs --richlist");
  const WeightedSample& sample = survey.sample;

  W0Report report;
  report.manifest = std::move(manifest);
  if (options.fixed_wmin && options.fixed_alpha) {
    report.w_min = *options.fixed_wmin;
    report.alpha = *options.fixed_alpha;
  } else if (options.fixed_wmin) {
    report.w_min = *options.fixed_wmin;
    report.alpha =
        estimate_alpha(tail_view(sample, report.w_min), options.method).alpha;
  } else {
    WminSearchOptions search;
    search.lo = options.range_lo;
    search.hi = options.range_hi;
    search.threads = options.threads;
    const auto selection =
        select_wmin(sample, options.method, options.criterion, search);
    report.w_min = selection.w_min;
    report.alpha =
        options.fixed_alpha ? *options.fixed_alpha : selection.alpha.alpha;
  }
  report.bandwidth = options.bandwidth
                         ? *options.bandwidth
                         : select_bandwidth(sample, report.w_min).value;
  const KernelDensity kde = kernel_density(sample, report.bandwidth);
  report.root = solve_w0(sample, report.alpha, report.w_min,
                         options.normalization, kde, rich, W0Options{},
                         &report.trace);
  return report;
}

inline json to_json(const W0Report& report) {
  json j;
  j["manifest"] = report.manifest.to_json();
  j["w_min"] = report.w_min;
  j["alpha"] = report.alpha;
  j["bandwidth"] = report.bandwidth;
  j["w0"] = report.root;
  json trace = json::array();
  for (std::size_t i = 0; i < report.trace.w.size(); ++i)
    trace.push_back(json{{"w", report.trace.w[i]},
                         {"kernel", report.trace.kernel[i]},
                         {"fitted", report.trace.fitted[i]}});
  j["trace"] = std::move(trace);
  return j;
}

inline std::string to_csv(const W0Report& report) {
  std::string out = detail::csv_manifest_line(report.manifest);
  out += "# w0 " + format_double(report.root) + " w_min " +
         format_double(report.w_min) + " alpha " + format_double(report.alpha) +
         " bandwidth " + format_double(report.bandwidth) + "\n";
  out += "w,kernel,fitted,h\n";
  for (std::size_t i = 0; i < report.trace.w.size(); ++i) {
    out += format_double(report.trace.w[i]) + "," +
           format_double(report.trace.kernel[i]) + "," +
           format_double(report.trace.fitted[i]) + "," +
           format_double(report.trace.kernel[i] - report.trace.fitted[i]) + "\n";
  }
  return out;
}

}  // namespace wealthtail

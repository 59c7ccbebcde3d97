#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "wealthtail/errors.hpp"
#include "wealthtail/numeric.hpp"
#include "wealthtail/weighted_sample.hpp"

namespace wealthtail {

inline constexpr double inv_sqrt_2pi = 0.3989422804014327;

/// Histogram density with cells centered at the sample values; interior cell
/// boundaries sit at the midpoints between neighbors, the outermost cells
/// mirror their single available half-width so the total mass stays one.
class HistogramDensity {
 public:
  explicit HistogramDensity(const WeightedSample& sample) {
    const auto& v = sample.values();
    const auto& n = sample.weights();
    if (v.size() < 3)
      throw insufficient_data_error(
          "histogram needs at least 3 distinct values");
    const std::size_t k = v.size();
    edges_.resize(k + 1);
    edges_[0] = v[0] - 0.5 * (v[1] - v[0]);
    for (std::size_t i = 1; i < k; ++i) edges_[i] = 0.5 * (v[i - 1] + v[i]);
    edges_[k] = v[k - 1] + 0.5 * (v[k - 1] - v[k - 2]);

    heights_.resize(k);
    for (std::size_t i = 0; i < k; ++i)
      heights_[i] = n[i] / (sample.total_weight() * (edges_[i + 1] - edges_[i]));
  }

  /// Density at w; cells are half-open (lower edge excluded) except the
  /// first, which includes its lower edge.
  double operator()(double w) const {
    if (w < edges_.front() || w > edges_.back()) return 0.0;
    if (w == edges_.front()) return heights_.front();
    const auto it = std::lower_bound(edges_.begin(), edges_.end(), w);
    const std::size_t cell = static_cast<std::size_t>(it - edges_.begin()) - 1;
    return heights_[std::min(cell, heights_.size() - 1)];
  }

  const std::vector<double>& edges() const { return edges_; }
  const std::vector<double>& heights() const { return heights_; }

  double total_mass() const {
    double mass = 0.0;
    for (std::size_t i = 0; i < heights_.size(); ++i)
      mass += heights_[i] * (edges_[i + 1] - edges_[i]);
    return mass;
  }

 private:
  std::vector<double> edges_;
  std::vector<double> heights_;
};

inline HistogramDensity histogram_density(const WeightedSample& sample) {
  return HistogramDensity(sample);
}

/// Weighted Gaussian kernel density
/// f(w) = (1/(N h)) sum_i n(w_i) K((w - w_i)/h).
/// Evaluation skips points farther than 8 bandwidths; the neglected kernel
/// mass is below 1e-15.
class KernelDensity {
 public:
  KernelDensity(const WeightedSample& sample, double h)
      : values_(sample.values()),
        weights_(sample.weights()),
        total_(sample.total_weight()),
        h_(h) {
    if (!(h > 0.0)) throw std::domain_error("bandwidth must be positive");
  }

  double operator()(double w) const {
    const double lo = w - 8.0 * h_;
    const double hi = w + 8.0 * h_;
    auto it = std::lower_bound(values_.begin(), values_.end(), lo);
    double sum = 0.0;
    for (; it != values_.end() && *it <= hi; ++it) {
      const double z = (w - *it) / h_;
      sum += weights_[it - values_.begin()] * std::exp(-0.5 * z * z);
    }
    return sum * inv_sqrt_2pi / (total_ * h_);
  }

  double bandwidth() const { return h_; }
  double min_value() const { return values_.front(); }
  double max_value() const { return values_.back(); }

 private:
  std::vector<double> values_;
  std::vector<double> weights_;
  double total_;
  double h_;
};

inline KernelDensity kernel_density(const WeightedSample& sample, double h) {
  return KernelDensity(sample, h);
}

namespace detail {

/// Binned counts of pairwise distances, bin width d (same device R's
/// bandwidth selectors use; nb = 1000 keeps the functional estimates well
/// below the tolerance of the surrounding root search).
struct PairCounts {
  double d = 0.0;
  std::vector<double> counts;
};

inline PairCounts pair_counts(std::span<const double> x, std::size_t nb) {
  PairCounts pc;
  pc.counts.assign(nb, 0.0);
  const auto [mn, mx] = std::minmax_element(x.begin(), x.end());
  const double range = (*mx - *mn) * 1.01;
  if (!(range > 0.0)) throw insufficient_data_error("data has zero spread");
  pc.d = range / static_cast<double>(nb);
  std::vector<long long> bin(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    bin[i] = static_cast<long long>(std::floor((x[i] - *mn) / pc.d));
  for (std::size_t i = 1; i < x.size(); ++i)
    for (std::size_t j = 0; j < i; ++j) {
      const long long k = std::abs(bin[i] - bin[j]);
      if (k < static_cast<long long>(nb)) pc.counts[k] += 1.0;
    }
  return pc;
}

/// Estimate of the density functional psi_4 = int f''(x)^2 dx at pilot
/// bandwidth h (Gaussian kernel).
inline double phi4_hat(std::size_t n, const PairCounts& pc, double h) {
  double sum = 0.0;
  for (std::size_t k = 0; k < pc.counts.size(); ++k) {
    const double delta = static_cast<double>(k) * pc.d / h;
    const double d2 = delta * delta;
    if (d2 >= 1000.0) break;
    sum += std::exp(-0.5 * d2) * (d2 * d2 - 6.0 * d2 + 3.0) * pc.counts[k];
  }
  sum = 2.0 * sum + 3.0 * static_cast<double>(n);
  const double nd = static_cast<double>(n);
  return sum / (nd * (nd - 1.0) * std::pow(h, 5.0)) * inv_sqrt_2pi;
}

/// Estimate of psi_6 at pilot bandwidth h.
inline double phi6_hat(std::size_t n, const PairCounts& pc, double h) {
  double sum = 0.0;
  for (std::size_t k = 0; k < pc.counts.size(); ++k) {
    const double delta = static_cast<double>(k) * pc.d / h;
    const double d2 = delta * delta;
    if (d2 >= 1000.0) break;
    sum += std::exp(-0.5 * d2) *
           (d2 * d2 * d2 - 15.0 * d2 * d2 + 45.0 * d2 - 15.0) * pc.counts[k];
  }
  sum = 2.0 * sum - 15.0 * static_cast<double>(n);
  const double nd = static_cast<double>(n);
  return sum / (nd * (nd - 1.0) * std::pow(h, 7.0)) * inv_sqrt_2pi;
}

inline double sample_sd(std::span<const double> x) {
  const double n = static_cast<double>(x.size());
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / (n - 1.0));
}

}  // namespace detail

struct Bandwidth {
  double value = 0.0;
  /// True when the solve-the-equation search failed and the rule-of-thumb
  /// value was returned instead.
  bool silverman_fallback = false;
};

/// Silverman's rule of thumb, 0.9 min(sd, IQR/1.34) n^{-1/5}.
inline double silverman_bandwidth(std::span<const double> x) {
  if (x.size() < 2) throw insufficient_data_error("need at least 2 points");
  std::vector<double> sorted(x.begin(), x.end());
  std::sort(sorted.begin(), sorted.end());
  const double sd = detail::sample_sd(sorted);
  const double iqr =
      quantile_type7(sorted, 0.75) - quantile_type7(sorted, 0.25);
  double lo = std::min(sd, iqr / 1.34);
  if (!(lo > 0.0)) lo = sd;
  if (!(lo > 0.0)) lo = std::abs(sorted[0]);
  if (!(lo > 0.0)) lo = 1.0;
  return 0.9 * lo * std::pow(static_cast<double>(x.size()), -0.2);
}

/// Sheather-Jones solve-the-equation bandwidth. Falls back to Silverman's
/// rule (flagged) when the pilot functionals degenerate or the equation
/// cannot be bracketed.
inline Bandwidth sj_bandwidth(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n < 2) throw insufficient_data_error("need at least 2 points");
  const auto fallback = [&] { return Bandwidth{silverman_bandwidth(x), true}; };

  std::vector<double> sorted(x.begin(), x.end());
  std::sort(sorted.begin(), sorted.end());
  const double sd = detail::sample_sd(sorted);
  const double iqr =
      quantile_type7(sorted, 0.75) - quantile_type7(sorted, 0.25);
  const double scale = std::min(sd, iqr / 1.349);
  if (!(scale > 0.0) || !std::isfinite(scale)) return fallback();

  detail::PairCounts pc;
  try {
    pc = detail::pair_counts(sorted, 1000);
  } catch (const insufficient_data_error&) {
    return fallback();
  }

  const double nd = static_cast<double>(n);
  const double a = 1.24 * scale * std::pow(nd, -1.0 / 7.0);
  const double b = 1.23 * scale * std::pow(nd, -1.0 / 9.0);
  const double c1 = 1.0 / (2.0 * std::sqrt(M_PI) * nd);
  const double td = -detail::phi6_hat(n, pc, b);
  if (!std::isfinite(td) || td <= 0.0) return fallback();
  const double sda = detail::phi4_hat(n, pc, a);
  if (!std::isfinite(sda) || sda <= 0.0) return fallback();
  const double alph2 = 1.357 * std::pow(sda / td, 1.0 / 7.0);
  if (!std::isfinite(alph2)) return fallback();

  const auto f = [&](double h) {
    const double sdh = detail::phi4_hat(n, pc, alph2 * std::pow(h, 5.0 / 7.0));
    return std::pow(c1 / sdh, 0.2) - h;
  };

  const double hmax = 1.144 * sd * std::pow(nd, -0.2);
  double lo = 0.1 * hmax, hi = hmax;
  double flo = f(lo), fhi = f(hi);
  int tries = 0;
  while (flo * fhi > 0.0) {
    if (++tries > 99) return fallback();
    if (tries % 2 == 1) {
      hi *= 1.2;
      fhi = f(hi);
    } else {
      lo /= 1.2;
      flo = f(lo);
    }
  }
  for (int iter = 0; iter < 200 && (hi - lo) > 1e-10 * lo; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return {mid, false};
    if (flo * fm < 0.0) {
      hi = mid;
    } else {
      lo = mid;
      flo = fm;
    }
  }
  return {0.5 * (lo + hi), false};
}

/// Bandwidth for the transition-region kernel density: Sheather-Jones on the
/// distinct values strictly above w_floor, ignoring weights.
inline Bandwidth select_bandwidth(const WeightedSample& sample, double w_floor) {
  std::vector<double> points;
  for (double v : sample.values())
    if (v > w_floor) points.push_back(v);
  if (points.size() < 10)
    throw insufficient_data_error(
        "bandwidth selection needs at least 10 distinct values above the floor");
  return sj_bandwidth(points);
}

/// Empirical van der Wijk ratios: mean wealth above each threshold divided
/// by the threshold, with strict comparison as in the ratio test. Constant
/// near alpha/(alpha-1) where the tail is Pareto.
struct WijkCurve {
  std::vector<double> thresholds;
  std::vector<std::optional<double>> ratios;  // missing where the tail is empty
};

inline WijkCurve wijk_curve(const WeightedSample& sample,
                            std::span<const double> thresholds) {
  const auto& values = sample.values();
  const auto& weights = sample.weights();
  WijkCurve curve;
  curve.thresholds.assign(thresholds.begin(), thresholds.end());
  curve.ratios.resize(thresholds.size());
  for (std::size_t t = 0; t < thresholds.size(); ++t) {
    const double w0 = thresholds[t];
    const auto first =
        std::upper_bound(values.begin(), values.end(), w0) - values.begin();
    double mass = 0.0, wealth = 0.0;
    for (std::size_t i = first; i < values.size(); ++i) {
      mass += weights[i];
      wealth += weights[i] * values[i];
    }
    if (mass > 0.0) curve.ratios[t] = wealth / (w0 * mass);
  }
  return curve;
}

}  // namespace wealthtail

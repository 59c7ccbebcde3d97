#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "wealthtail/errors.hpp"
#include "wealthtail/numeric.hpp"
#include "wealthtail/rng.hpp"

namespace wealthtail {

/// Pareto upper tail with density c * w^{-(alpha+1)} on (w0, w_max].
/// Probability-normalized tails have c = alpha * w0^alpha; tails inside a
/// composite model carry the normalization constant of that model instead.
/// alpha may be <= 1 for density/mass work; the first-moment operations
/// require alpha > 1 and throw otherwise.
struct ParetoTail {
  double alpha;
  double c;
  double w0;
  std::optional<double> w_max;

  ParetoTail(double alpha_arg, double c_arg, double w0_arg,
             std::optional<double> w_max_arg = std::nullopt)
      : alpha(alpha_arg), c(c_arg), w0(w0_arg), w_max(w_max_arg) {
    if (!(alpha > 0.0)) throw validation_error("alpha must be positive");
    if (!(c > 0.0)) throw validation_error("normalization constant must be positive");
    if (!(w0 > 0.0)) throw validation_error("support start must be positive");
    if (w_max && !(*w_max > w0))
      throw validation_error("truncation point must exceed the support start");
  }

  /// Tail normalized to total mass one at w0.
  static ParetoTail normalized(double alpha, double w0,
                               std::optional<double> w_max = std::nullopt) {
    return ParetoTail(alpha, scaled_pow(alpha, w0, alpha), w0, w_max);
  }
};

/// c * w^{-(alpha+1)} on the support, 0 outside (support is open at w0).
inline double density(const ParetoTail& tail, double w) {
  if (!(w > 0.0)) throw std::domain_error("density requires w > 0");
  if (w <= tail.w0) return 0.0;
  if (tail.w_max && w > *tail.w_max) return 0.0;
  return scaled_pow(tail.c, w, -(tail.alpha + 1.0));
}

/// Probability mass above w: (c/alpha) * w^{-alpha}, minus the mass beyond
/// the truncation point when one is set.
inline double tail_mass(const ParetoTail& tail, double w) {
  if (w < tail.w0) throw std::domain_error("tail_mass requires w >= w0");
  double mass = scaled_pow(tail.c / tail.alpha, w, -tail.alpha);
  if (tail.w_max)
    mass -= scaled_pow(tail.c / tail.alpha, *tail.w_max, -tail.alpha);
  return std::max(mass, 0.0);
}

/// Wealth mass above w per household: integral of x * f(x) from w upward,
/// i.e. (c/(alpha-1)) * (w^{-(alpha-1)} - w_max^{-(alpha-1)}).
inline double partial_mean(const ParetoTail& tail, double w) {
  if (!(tail.alpha > 1.0))
    throw infinite_mean_error("partial mean requires alpha > 1");
  if (w < tail.w0) throw std::domain_error("partial_mean requires w >= w0");
  const double scale = tail.c / (tail.alpha - 1.0);
  double mean = scaled_pow(scale, w, -(tail.alpha - 1.0));
  if (tail.w_max) mean -= scaled_pow(scale, *tail.w_max, -(tail.alpha - 1.0));
  return std::max(mean, 0.0);
}

/// Inverse of tail_mass: the wealth above which mass p lies. Round-trips
/// with tail_mass on [w0, w_max).
inline double quantile(const ParetoTail& tail, double p) {
  if (!(p > 0.0) || p > tail_mass(tail, tail.w0) * (1.0 + 1e-12))
    throw std::domain_error("quantile mass outside (0, tail_mass(w0)]");
  double base = p * tail.alpha / tail.c;
  if (tail.w_max) base += scaled_pow(1.0, *tail.w_max, -tail.alpha);
  return std::pow(base, -1.0 / tail.alpha);
}

/// Mean wealth above w under van der Wijk's law: (alpha/(alpha-1)) * w.
/// Only defined for untruncated tails.
inline double wijk_mean(const ParetoTail& tail, double w) {
  if (!(tail.alpha > 1.0))
    throw infinite_mean_error("wijk mean requires alpha > 1");
  if (tail.w_max) throw std::domain_error("wijk mean is an untruncated identity");
  if (w < tail.w0) throw std::domain_error("wijk_mean requires w >= w0");
  return tail.alpha / (tail.alpha - 1.0) * w;
}

/// Inverse-transform draw w = w_min_gen * u^{-1/alpha} with u on (0, 1].
inline double pareto_draw(Rng& rng, double alpha, double w_min_gen) {
  const double u = rng.uniform_open_closed();
  return w_min_gen * std::exp(-std::log(u) / alpha);
}

/// n inverse-transform draws; deterministic given the seed.
inline std::vector<double> sample_pareto(double alpha, double w_min_gen,
                                         std::size_t n, std::uint64_t seed) {
  if (!(alpha > 0.0)) throw validation_error("alpha must be positive");
  if (n == 0) throw validation_error("need at least one draw");
  Rng rng(seed);
  std::vector<double> draws(n);
  for (double& w : draws) w = pareto_draw(rng, alpha, w_min_gen);
  return draws;
}

}  // namespace wealthtail

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "wealthtail/numeric.hpp"
#include "wealthtail/pareto.hpp"

using namespace wealthtail;
using Catch::Matchers::WithinRel;

TEST_CASE("density closed form") {
  REQUIRE(density(ParetoTail(1.0, 1.0, 1.0), 2.0) == 0.25);
  REQUIRE(density(ParetoTail(1.0, 1.0, 1.0), 0.5) == 0.0);
  REQUIRE_THAT(density(ParetoTail(1.5, 2.0, 1.0), 4.0),
               WithinRel(0.0625, 1e-14));
  // support is open at w0 and closed at w_max
  REQUIRE(density(ParetoTail(2.0, 2.0, 1.0), 1.0) == 0.0);
  const ParetoTail truncated(2.0, 2.0, 1.0, 10.0);
  REQUIRE(density(truncated, 10.0) > 0.0);
  REQUIRE(density(truncated, 10.5) == 0.0);
  REQUIRE_THROWS_AS(density(truncated, -1.0), std::domain_error);
}

TEST_CASE("tail mass closed form") {
  const ParetoTail tail(2.0, 2.0, 1.0);
  REQUIRE(tail_mass(tail, 1.0) == 1.0);
  REQUIRE_THAT(tail_mass(tail, 10.0), WithinRel(0.01, 1e-13));
  REQUIRE_THROWS_AS(tail_mass(tail, 0.5), std::domain_error);

  // a remote truncation point reproduces the untruncated value
  const ParetoTail far_truncated(2.0, 2.0, 1.0, 1e160);
  REQUIRE_THAT(tail_mass(far_truncated, 10.0),
               WithinRel(tail_mass(tail, 10.0), 1e-12));

  // normalized constructor integrates to one
  const ParetoTail normalized = ParetoTail::normalized(1.7, 3.0e5);
  REQUIRE_THAT(tail_mass(normalized, 3.0e5), WithinRel(1.0, 1e-12));
}

TEST_CASE("partial mean closed form and quadrature") {
  const ParetoTail tail(2.0, 2.0, 1.0);
  REQUIRE_THAT(partial_mean(tail, 1.0), WithinRel(2.0, 1e-13));

  SECTION("truncated partial mean vanishes at the truncation point") {
    const ParetoTail truncated(2.0, 2.0, 1.0, 50.0);
    REQUIRE(partial_mean(truncated, 50.0) == 0.0);
  }

  SECTION("log-space Simpson quadrature agrees") {
    for (const double alpha : {1.2, 1.5, 2.0, 3.0}) {
      const ParetoTail t = ParetoTail::normalized(alpha, 2.0);
      const double w = 3.0;
      const double upper = 2.0e6;  // compare over a finite window
      const auto integrand = [&](double u) {
        const double x = std::exp(u);
        return x * density(t, x) * x;  // d w = x d u
      };
      const double quad =
          simpson(integrand, std::log(w), std::log(upper), 4000);
      const double closed = partial_mean(t, w) - partial_mean(t, upper);
      REQUIRE_THAT(quad, WithinRel(closed, 1e-8));
    }
  }

  REQUIRE_THROWS_AS(partial_mean(ParetoTail(1.0, 1.0, 1.0), 2.0),
                    infinite_mean_error);
  REQUIRE_THROWS_AS(partial_mean(ParetoTail(0.8, 1.0, 1.0), 2.0),
                    infinite_mean_error);
}

TEST_CASE("quantile inverts tail mass") {
  const ParetoTail tail(2.0, 2.0, 1.0);
  REQUIRE_THAT(quantile(tail, 0.04), WithinRel(5.0, 1e-13));
  REQUIRE_THAT(quantile(tail, tail_mass(tail, 1.0)), WithinRel(1.0, 1e-13));
  REQUIRE_THROWS_AS(quantile(tail, 0.0), std::domain_error);
  REQUIRE_THROWS_AS(quantile(tail, 1.5), std::domain_error);

  SECTION("round trip on random masses, truncated and not") {
    Rng rng(17);
    const ParetoTail cases[] = {ParetoTail::normalized(1.5, 0.5e6),
                                ParetoTail(1.5, 3.0e8, 0.5e6, 2.0e10),
                                ParetoTail(2.5, 7.0, 2.0)};
    for (const ParetoTail& t : cases) {
      const double top = tail_mass(t, t.w0);
      for (int i = 0; i < 100; ++i) {
        const double p = top * (1e-6 + (1.0 - 2e-6) * rng.uniform01());
        const double w = quantile(t, p);
        REQUIRE_THAT(tail_mass(t, w), WithinRel(p, 1e-12));
      }
    }
  }
}

TEST_CASE("van der Wijk mean") {
  REQUIRE_THAT(wijk_mean(ParetoTail::normalized(1.5, 1.0), 1.0),
               WithinRel(3.0, 1e-14));
  REQUIRE_THAT(wijk_mean(ParetoTail::normalized(2.0, 1.0), 10.0),
               WithinRel(20.0, 1e-14));
  REQUIRE_THROWS_AS(wijk_mean(ParetoTail(1.0, 1.0, 1.0), 1.0),
                    infinite_mean_error);
  REQUIRE_THROWS_AS(wijk_mean(ParetoTail(2.0, 2.0, 1.0, 9.0), 1.0),
                    std::domain_error);

  SECTION("identity with the two closed forms") {
    const ParetoTail t = ParetoTail::normalized(1.4, 2.0e5);
    for (const double w : {2.0e5, 5.0e5, 4.0e6, 9.0e8}) {
      REQUIRE_THAT(partial_mean(t, w) / tail_mass(t, w),
                   WithinRel(wijk_mean(t, w), 1e-12));
    }
  }
}

TEST_CASE("closed forms survive extreme magnitudes") {
  // alpha * ln(w) far beyond the direct-pow comfort zone
  const ParetoTail huge = ParetoTail::normalized(3.0, 1.0e9);
  const double mass = tail_mass(huge, 1.0e10);
  REQUIRE(std::isfinite(mass));
  REQUIRE_THAT(mass, WithinRel(1e-3, 1e-10));
  REQUIRE(std::isfinite(density(huge, 5.0e9)));
  REQUIRE(density(huge, 5.0e9) > 0.0);
}

TEST_CASE("sampling") {
  SECTION("same seed, same sequence") {
    const auto a = sample_pareto(1.5, 0.5e6, 1000, 7);
    const auto b = sample_pareto(1.5, 0.5e6, 1000, 7);
    REQUIRE(a == b);
    const auto c = sample_pareto(1.5, 0.5e6, 1000, 8);
    REQUIRE(a != c);
  }

  SECTION("draws never fall below the threshold") {
    const auto draws = sample_pareto(1.5, 2.0, 20000, 3);
    REQUIRE(*std::min_element(draws.begin(), draws.end()) >= 2.0);
  }

  SECTION("empirical CCDF at twice the threshold") {
    const double alpha = 1.5;
    const std::size_t n = 100000;
    const auto draws = sample_pareto(alpha, 1.0, n, 12345);
    const double p_true = std::pow(2.0, -alpha);
    double hits = 0;
    for (double w : draws) hits += (w > 2.0);
    const double sigma = std::sqrt(p_true * (1.0 - p_true) / n);
    REQUIRE(std::abs(hits / n - p_true) < 3.0 * sigma);
  }

  SECTION("Kolmogorov-Smirnov distance of the empirical CCDF") {
    const double alpha = 1.5;
    const std::size_t n = 100000;
    auto draws = sample_pareto(alpha, 1.0, n, 2024);
    std::sort(draws.begin(), draws.end());
    double ks = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double ccdf_true = std::pow(draws[i], -alpha);
      const double above = static_cast<double>(n - i) / n;
      const double below = static_cast<double>(n - i - 1) / n;
      ks = std::max(ks, std::max(std::abs(ccdf_true - above),
                                 std::abs(ccdf_true - below)));
    }
    REQUIRE(ks < 0.01);
  }
}

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "wealthtail/estimators.hpp"
#include "wealthtail/rng.hpp"
#include "wealthtail/weighted_sample.hpp"

using namespace wealthtail;

TEST_CASE("duplicate values merge with summed weights") {
  WeightedSample s({5.0, 3.0, 5.0}, {2.0, 1.0, 1.0});
  REQUIRE(s.values() == std::vector<double>{3.0, 5.0});
  REQUIRE(s.weights() == std::vector<double>{1.0, 3.0});
  REQUIRE(s.total_weight() == 4.0);
}

TEST_CASE("merging preserves the total weight exactly") {
  Rng rng(7);
  std::vector<double> values, weights;
  double expected = 0.0;
  for (int i = 0; i < 500; ++i) {
    values.push_back(static_cast<double>(rng.bits() % 100));
    weights.push_back(1.0 + static_cast<double>(rng.bits() % 8));
  }
  // integer-valued weights: sums are exact in double arithmetic
  for (double w : weights) expected += w;
  WeightedSample s(values, weights);
  REQUIRE(s.total_weight() == expected);
  REQUIRE(s.size() <= 100);
}

TEST_CASE("construction validates inputs") {
  REQUIRE_THROWS_AS(WeightedSample({}, {}), validation_error);
  REQUIRE_THROWS_AS(WeightedSample({1.0}, {0.0}), validation_error);
  REQUIRE_THROWS_AS(WeightedSample({1.0}, {-2.0}), validation_error);
  REQUIRE_THROWS_AS(WeightedSample({1.0, 2.0}, {1.0}), validation_error);
}

TEST_CASE("tail view counts are inclusive and cumulative") {
  WeightedSample s({1.0, 2.0, 3.0}, {1.0, 1.0, 1.0});
  TailView tail = tail_view(s, 2.0);
  REQUIRE(tail.values == std::vector<double>{2.0, 3.0});
  REQUIRE(tail.counts == std::vector<double>{2.0, 1.0});
  REQUIRE(tail.total == 2.0);

  TailView whole = tail_view(s, s.min_value());
  REQUIRE(whole.total == s.total_weight());

  REQUIRE_THROWS_AS(tail_view(s, 10.0), degenerate_tail_error);
}

TEST_CASE("tail counts match a brute-force filter") {
  Rng rng(11);
  std::vector<double> values, weights;
  for (int i = 0; i < 300; ++i) {
    values.push_back(1.0 + 100.0 * rng.uniform01());
    weights.push_back(0.5 + 3.0 * rng.uniform01());
  }
  WeightedSample s(values, weights);
  for (int probe = 0; probe < 50; ++probe) {
    const double w_min = 1.0 + 99.0 * rng.uniform01();
    const TailView tail = tail_view(s, w_min);
    double brute = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i)
      if (s.values()[i] >= w_min) brute += s.weights()[i];
    REQUIRE_THAT(tail.total, Catch::Matchers::WithinRel(brute, 1e-12));
    // N(w) is non-increasing
    for (std::size_t i = 1; i < tail.size(); ++i)
      REQUIRE(tail.counts[i] <= tail.counts[i - 1]);
  }
}

TEST_CASE("aggregated and repeated-row encodings give identical tail counts") {
  WeightedSample aggregated({10.0, 20.0, 30.0}, {3.0, 2.0, 1.0});
  WeightedSample repeated({10, 10, 10, 20, 20, 30}, {1, 1, 1, 1, 1, 1});
  for (double w : {5.0, 10.0, 15.0, 20.0, 25.0, 30.0}) {
    const TailView a = tail_view(aggregated, w);
    const TailView b = tail_view(repeated, w);
    REQUIRE(a.total == b.total);
    REQUIRE(a.counts == b.counts);
  }
}

TEST_CASE("implicate averaging") {
  SECTION("constant imputation stays constant") {
    std::vector<RawTable> tables(5, RawTable{{1.0, 2.0}});
    const ImplicateSet set = average_implicates(tables);
    REQUIRE(set.averaged.values() == std::vector<double>{1.0});
    REQUIRE(set.averaged.weights() == std::vector<double>{2.0});
  }

  SECTION("arithmetic mean of the imputed values") {
    std::vector<RawTable> tables;
    for (double w : {1.0, 2.0, 3.0, 4.0, 5.0}) tables.push_back(RawTable{{w, 7.0}});
    const ImplicateSet set = average_implicates(tables);
    REQUIRE(set.averaged.values() == std::vector<double>{3.0});
    REQUIRE(set.averaged.weights() == std::vector<double>{7.0});
    for (const auto& implicate : set.implicates)
      REQUIRE(implicate.total_weight() == set.averaged.total_weight());
  }

  SECTION("random table matches independently computed row means") {
    Rng rng(3);
    const std::size_t rows = 100;
    std::vector<RawTable> tables(5, RawTable(rows));
    std::vector<double> mean(rows, 0.0), weight(rows);
    for (std::size_t r = 0; r < rows; ++r) {
      weight[r] = 1.0 + rng.uniform01();
      for (std::size_t t = 0; t < 5; ++t) {
        const double w = 1000.0 * (1.0 + rng.uniform01());
        tables[t][r] = RawRow{w, weight[r]};
        mean[r] += w;
      }
      mean[r] /= 5.0;
    }
    const ImplicateSet set = average_implicates(tables);
    const WeightedSample oracle = WeightedSample(mean, weight);
    REQUIRE(set.averaged.values().size() == oracle.values().size());
    for (std::size_t i = 0; i < oracle.size(); ++i) {
      REQUIRE(set.averaged.values()[i] == oracle.values()[i]);
      REQUIRE(set.averaged.weights()[i] == oracle.weights()[i]);
    }
  }

  SECTION("misaligned tables are rejected") {
    std::vector<RawTable> wrong_count(4, RawTable{{1.0, 1.0}});
    REQUIRE_THROWS_AS(average_implicates(wrong_count), alignment_error);

    std::vector<RawTable> tables(5, RawTable{{1.0, 1.0}});
    tables[3].push_back(RawRow{2.0, 1.0});
    REQUIRE_THROWS_AS(average_implicates(tables), alignment_error);

    std::vector<RawTable> weights_differ(5, RawTable{{1.0, 1.0}});
    weights_differ[2][0].weight = 2.0;
    REQUIRE_THROWS_AS(average_implicates(weights_differ), alignment_error);
  }
}

TEST_CASE("rich list bookkeeping") {
  RichList rich({{4e9, 1}, {1e9, 2}, {6e8, 1}, {3e8, 1}}, 5e8, 4.5e8);
  REQUIRE(rich.count_at_w1() == 4.0);
  REQUIRE(rich.usable_entries().size() == 3);
  REQUIRE(rich.entries().front().wealth == 4e9);

  REQUIRE_THROWS_AS(RichList({{1e9, 1.5}}, 5e8, 5e8), validation_error);
  REQUIRE_THROWS_AS(RichList({{1e9, 1}}, 4e8, 5e8), validation_error);
}

TEST_CASE("combining survey and rich list") {
  WeightedSample survey({1e6}, {5.0});
  const TailView tail = tail_view(survey, 1e6);

  SECTION("concatenation keeps weights from both sources") {
    RichList rich({{1e9, 2}}, 1e9, 1e9);
    const WeightedSample combined = combine_survey_richlist(tail, rich);
    REQUIRE(combined.values() == std::vector<double>{1e6, 1e9});
    REQUIRE(combined.weights() == std::vector<double>{5.0, 2.0});
    REQUIRE(combined.combined_sources());
  }

  SECTION("a rich list with nothing above its threshold changes nothing") {
    RichList rich({{1e5, 1}}, 1e9, 1e9);
    const WeightedSample combined = combine_survey_richlist(tail, rich);
    REQUIRE(combined.values() == survey.values());
    REQUIRE_FALSE(combined.combined_sources());
  }

  SECTION("overlapping ranges are rejected") {
    RichList rich({{5e5, 1}}, 1e5, 1e5);
    REQUIRE_THROWS_AS(combine_survey_richlist(tail, rich), configuration_error);
  }

  SECTION("household counts equal repeated unit-weight entries for the ML fit") {
    WeightedSample base({1e6, 2e6, 4e6}, {4.0, 2.0, 1.0});
    const TailView survey_tail = tail_view(base, 1e6);
    RichList counted({{1e9, 3}}, 1e9, 1e9);
    RichList repeated({{1e9, 1}, {1e9, 1}, {1e9, 1}}, 1e9, 1e9);
    const double a = alpha_ml(tail_view(combine_survey_richlist(survey_tail, counted), 1e6)).alpha;
    const double b = alpha_ml(tail_view(combine_survey_richlist(survey_tail, repeated), 1e6)).alpha;
    REQUIRE(a == b);
  }
}

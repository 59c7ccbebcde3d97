#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "wealthtail/csv.hpp"
#include "wealthtail/numeric.hpp"
#include "wealthtail/rng.hpp"
#include "wealthtail/synth.hpp"

using namespace wealthtail;

namespace {

std::filesystem::path write_temp(const std::string& name,
                                 const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream out(path);
  out << content;
  return path;
}

}  // namespace

TEST_CASE("loading merges duplicates and sorts ascending") {
  const auto path = write_temp("wt_basic.csv",
                               "wealth,weight\n5,2\n3,1\n5,1\n");
  const WeightedSample s = load_weighted_csv(path);
  REQUIRE(s.values() == std::vector<double>{3.0, 5.0});
  REQUIRE(s.weights() == std::vector<double>{1.0, 3.0});
  REQUIRE(s.total_weight() == 4.0);
}

TEST_CASE("missing weight column defaults to one per row") {
  const auto path = write_temp("wt_noweight.csv", "wealth\n10\n");
  const WeightedSample s = load_weighted_csv(path);
  REQUIRE(s.values() == std::vector<double>{10.0});
  REQUIRE(s.weights() == std::vector<double>{1.0});
}

TEST_CASE("loader error paths") {
  SECTION("malformed row reports its line number") {
    const auto path =
        write_temp("wt_bad.csv", "wealth,weight\n1,1\nbogus,2\n");
    try {
      load_weighted_csv(path);
      FAIL("expected parse_error");
    } catch (const parse_error& e) {
      REQUIRE(e.line == 3);
    }
  }

  SECTION("non-positive weight") {
    const auto path = write_temp("wt_negw.csv", "wealth,weight\n1,-3\n");
    REQUIRE_THROWS_AS(load_weighted_csv(path), validation_error);
  }

  SECTION("empty file") {
    const auto path = write_temp("wt_empty.csv", "");
    REQUIRE_THROWS_AS(load_weighted_csv(path), validation_error);
  }

  SECTION("header only") {
    const auto path = write_temp("wt_headeronly.csv", "wealth,weight\n");
    REQUIRE_THROWS_AS(load_weighted_csv(path), validation_error);
  }

  SECTION("missing wealth column") {
    const auto path = write_temp("wt_nocol.csv", "networth\n1\n");
    REQUIRE_THROWS_AS(load_weighted_csv(path), validation_error);
  }

  SECTION("short row") {
    const auto path = write_temp("wt_short.csv", "wealth,weight\n1\n");
    REQUIRE_THROWS_AS(load_weighted_csv(path), parse_error);
  }

  SECTION("implicate file refused by the plain loader") {
    const auto path =
        write_temp("wt_imp.csv", "wealth,weight,implicate\n1,1,1\n");
    REQUIRE_THROWS_AS(load_weighted_csv(path), validation_error);
  }

  SECTION("implicate out of range") {
    const auto path =
        write_temp("wt_imp6.csv", "wealth,weight,implicate\n1,1,6\n");
    REQUIRE_THROWS_AS(load_survey_csv(path), parse_error);
  }
}

TEST_CASE("unknown columns are ignored") {
  const auto path = write_temp(
      "wt_extra.csv", "id,wealth,region,weight\n7,100,north,2\n8,50,south,1\n");
  const WeightedSample s = load_weighted_csv(path);
  REQUIRE(s.values() == std::vector<double>{50.0, 100.0});
  REQUIRE(s.weights() == std::vector<double>{1.0, 2.0});
}

TEST_CASE("a synthetic file round-trips exactly") {
  SynthConfig config;
  config.rows = 1000;
  config.seed = 99;
  const auto tables = synth_survey(config);
  const auto path = std::filesystem::temp_directory_path() / "wt_round.csv";
  write_survey_csv(path, tables);
  const WeightedSample loaded = load_weighted_csv(path);
  const WeightedSample direct = WeightedSample::from_rows(tables.front());
  REQUIRE(loaded.values() == direct.values());
  REQUIRE(loaded.weights() == direct.weights());
  REQUIRE(loaded.total_weight() == direct.total_weight());
}

TEST_CASE("implicate files load into five samples plus the average") {
  SynthConfig config;
  config.rows = 200;
  config.n_implicates = 5;
  config.imputed_fraction = 0.4;
  config.seed = 5;
  const auto tables = synth_survey(config);
  const auto path = std::filesystem::temp_directory_path() / "wt_impl.csv";
  write_survey_csv(path, tables);

  const SurveyData survey = load_survey_csv(path);
  REQUIRE(survey.has_implicates());
  REQUIRE(survey.implicate_set->implicates.size() == 5);
  const ImplicateSet oracle = average_implicates(tables);
  REQUIRE(survey.sample.values() == oracle.averaged.values());
  for (std::size_t i = 0; i < 5; ++i)
    REQUIRE(survey.implicate_set->implicates[i].total_weight() ==
            oracle.averaged.total_weight());
}

TEST_CASE("rich list files") {
  const auto path = write_temp("wt_rich.csv",
                               "wealth,households\n4e9,1\n1e9,2\n6e8,1\n");
  SECTION("threshold defaults to the smallest wealth") {
    const RichList rich = load_richlist_csv(path);
    REQUIRE(rich.w1_count() == 6e8);
    REQUIRE(rich.count_at_w1() == 4.0);
  }
  SECTION("explicit count and scale thresholds") {
    const RichList rich = load_richlist_csv(path, 1e9, 9e8);
    REQUIRE(rich.count_at_w1() == 3.0);
    REQUIRE(rich.w1_scale() == 9e8);
  }
  SECTION("round trip") {
    const RichList rich = load_richlist_csv(path);
    const auto copy_path = std::filesystem::temp_directory_path() / "wt_rich2.csv";
    write_richlist_csv(copy_path, rich);
    const RichList copy = load_richlist_csv(copy_path);
    REQUIRE(copy.entries().size() == rich.entries().size());
    REQUIRE(copy.entries().front().wealth == 4e9);
  }
}

TEST_CASE("currency suffix parsing") {
  REQUIRE(parse_currency("5k") == 5000.0);
  REQUIRE(parse_currency("0.5M") == 0.5e6);
  REQUIRE(parse_currency("20G") == 20e9);
  REQUIRE(parse_currency("123") == 123.0);
  REQUIRE(parse_currency("75M") == 75e6);
  REQUIRE_THROWS_AS(parse_currency("12 tons"), validation_error);
  REQUIRE_THROWS_AS(parse_currency(""), validation_error);
}

#pragma once

#include <charconv>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "wealthtail/errors.hpp"
#include "wealthtail/numeric.hpp"
#include "wealthtail/weighted_sample.hpp"

namespace wealthtail {

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

inline std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == ',') {
      fields.emplace_back(trim(line.substr(start, i - start)));
      start = i + 1;
    }
  }
  return fields;
}

inline double parse_number(std::string_view field, std::size_t line) {
  double value = 0.0;
  const auto res =
      std::from_chars(field.data(), field.data() + field.size(), value);
  if (res.ec != std::errc{} || res.ptr != field.data() + field.size())
    throw parse_error("not a number: '" + std::string(field) + "'", line);
  return value;
}

struct CsvFile {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;  // data rows, in file order
  std::vector<std::size_t> line_numbers;       // 1-based, header is line 1

  std::optional<std::size_t> column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    return std::nullopt;
  }
};

inline CsvFile read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw validation_error("cannot open " + path.string());
  CsvFile file;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const std::string_view view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    auto fields = split_csv_line(view);
    if (file.header.empty()) {
      file.header = std::move(fields);
    } else {
      file.rows.push_back(std::move(fields));
      file.line_numbers.push_back(line_number);
    }
  }
  if (file.header.empty())
    throw validation_error("empty file: " + path.string());
  return file;
}

}  // namespace detail

/// Column names of a survey file. The weight and implicate columns are
/// optional in the file; unknown extra columns are ignored.
struct SurveyColumns {
  std::string wealth = "wealth";
  std::string weight = "weight";
  std::string implicate = "implicate";
};

/// Parsed survey file: either a single sample or five implicates with their
/// per-household average. `sample` is the single sample, or the averaged one
/// when implicates are present.
struct SurveyData {
  std::optional<ImplicateSet> implicate_set;
  WeightedSample sample;

  bool has_implicates() const { return implicate_set.has_value(); }
};

namespace detail {

inline std::vector<RawTable> read_survey_tables(const CsvFile& file,
                                                const SurveyColumns& columns) {
  const auto wealth_col = file.column(columns.wealth);
  if (!wealth_col)
    throw validation_error("missing column '" + columns.wealth + "'");
  const auto weight_col = file.column(columns.weight);
  const auto implicate_col = file.column(columns.implicate);
  if (file.rows.empty()) throw validation_error("file has no data rows");

  const std::size_t tables = implicate_col ? implicate_count : 1;
  std::vector<RawTable> out(tables);
  for (std::size_t r = 0; r < file.rows.size(); ++r) {
    const auto& row = file.rows[r];
    const std::size_t line = file.line_numbers[r];
    std::size_t required = *wealth_col;
    if (weight_col) required = std::max(required, *weight_col);
    if (implicate_col) required = std::max(required, *implicate_col);
    if (row.size() <= required)
      throw parse_error("row has too few fields", line);

    RawRow parsed;
    parsed.wealth = parse_number(row[*wealth_col], line);
    if (weight_col) {
      parsed.weight = parse_number(row[*weight_col], line);
      if (!(parsed.weight > 0.0))
        throw validation_error("non-positive weight at line " +
                               std::to_string(line));
    }
    std::size_t table = 0;
    if (implicate_col) {
      const double m = parse_number(row[*implicate_col], line);
      if (m < 1 || m > implicate_count || m != static_cast<std::size_t>(m))
        throw parse_error("implicate must be an integer in 1..5", line);
      table = static_cast<std::size_t>(m) - 1;
    }
    out[table].push_back(parsed);
  }
  return out;
}

}  // namespace detail

/// Loads a plain weighted sample (no implicate column allowed).
inline WeightedSample load_weighted_csv(const std::filesystem::path& path,
                                        const SurveyColumns& columns = {}) {
  const auto file = detail::read_csv(path);
  if (file.column(columns.implicate))
    throw validation_error(path.string() +
                           " has an implicate column; load it as a survey");
  return WeightedSample::from_rows(
      detail::read_survey_tables(file, columns).front());
}

/// Loads a survey file; handles both plain samples and five-implicate files.
inline SurveyData load_survey_csv(const std::filesystem::path& path,
                                  const SurveyColumns& columns = {}) {
  const auto file = detail::read_csv(path);
  auto tables = detail::read_survey_tables(file, columns);
  if (tables.size() == 1)
    return SurveyData{std::nullopt, WeightedSample::from_rows(tables.front())};
  auto set = average_implicates(tables);
  WeightedSample averaged = set.averaged;
  return SurveyData{std::move(set), std::move(averaged)};
}

/// Loads a rich list (columns `wealth`, `households`). The thresholds
/// default to the smallest listed wealth.
inline RichList load_richlist_csv(const std::filesystem::path& path,
                                  std::optional<double> w1_count = std::nullopt,
                                  std::optional<double> w1_scale = std::nullopt) {
  const auto file = detail::read_csv(path);
  const auto wealth_col = file.column("wealth");
  const auto households_col = file.column("households");
  if (!wealth_col) throw validation_error("missing column 'wealth'");
  if (!households_col) throw validation_error("missing column 'households'");
  if (file.rows.empty()) throw validation_error("file has no data rows");

  std::vector<RichEntry> entries;
  entries.reserve(file.rows.size());
  double min_wealth = 0.0;
  for (std::size_t r = 0; r < file.rows.size(); ++r) {
    const auto& row = file.rows[r];
    const std::size_t line = file.line_numbers[r];
    if (row.size() <= std::max(*wealth_col, *households_col))
      throw parse_error("row has too few fields", line);
    RichEntry entry;
    entry.wealth = detail::parse_number(row[*wealth_col], line);
    entry.households = detail::parse_number(row[*households_col], line);
    if (entries.empty() || entry.wealth < min_wealth) min_wealth = entry.wealth;
    entries.push_back(entry);
  }
  const double count = w1_count.value_or(min_wealth);
  return RichList(std::move(entries), count, w1_scale.value_or(count));
}

/// Writes survey tables in the format load_survey_csv reads back.
inline void write_survey_csv(const std::filesystem::path& path,
                             const std::vector<RawTable>& tables) {
  std::ofstream out(path);
  if (!out) throw validation_error("cannot write " + path.string());
  const bool implicates = tables.size() > 1;
  out << "wealth,weight";
  if (implicates) out << ",implicate";
  out << "\n";
  for (std::size_t t = 0; t < tables.size(); ++t) {
    for (const RawRow& row : tables[t]) {
      out << format_double(row.wealth) << ',' << format_double(row.weight);
      if (implicates) out << ',' << (t + 1);
      out << "\n";
    }
  }
}

inline void write_richlist_csv(const std::filesystem::path& path,
                               const RichList& rich) {
  std::ofstream out(path);
  if (!out) throw validation_error("cannot write " + path.string());
  out << "wealth,households\n";
  for (const RichEntry& entry : rich.entries())
    out << format_double(entry.wealth) << ',' << format_double(entry.households)
        << "\n";
}

}  // namespace wealthtail

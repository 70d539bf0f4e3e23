#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "fdrsel/datagen.hpp"
#include "fdrsel/metrics.hpp"
#include "fdrsel/simulation.hpp"

namespace fdrsel {

// 17 significant digits (round-trips exactly); "inf"/"-inf"; NaN is "NA".
std::string format_double(double v);
// Inverse of format_double.
double parse_double(std::string_view text);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// RFC 4180-style quoting. delim = 0 picks tab when the header has tabs and
// no commas, comma otherwise. Every row must match the header width.
Table parse_delimited(std::string_view text, char delim = 0);
Table read_delimited(const std::filesystem::path& path, char delim = 0);

struct LoadedData {
  Dataset data;
  std::vector<std::string> feature_names;
};

// All non-response columns become features; every cell must be numeric.
LoadedData to_dataset(const Table& table, std::string_view response_column);

// Writes then renames, so a reader never sees a half-written file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string replications_csv(const GridResult& result);
std::string summary_csv(const std::vector<ScenarioReport>& reports);
std::string summary_table(const std::vector<ScenarioReport>& reports);

std::string selected_csv(const SelectionOutcome& outcome, const std::vector<std::string>& names);

}  // namespace fdrsel

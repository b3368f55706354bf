#pragma once

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace subfid {

using Cell = std::variant<std::int64_t, double, std::string>;

// Output of one experiment: a CSV table plus provenance.
struct ExperimentRecord {
  std::string experiment;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  // Configuration, seeds and version, in insertion order.
  std::vector<std::pair<std::string, std::string>> parameters;
  std::vector<std::string> warnings;

  std::size_t column(std::string_view name) const;
  // Numeric cell (integers are widened).
  double number(std::size_t row, std::string_view name) const;
  const std::string& text(std::size_t row, std::string_view name) const;
  void set(std::string key, std::string value);
  const std::string* parameter(std::string_view key) const;
};

inline constexpr const char* kVersion = "1.0.0";

// Header row, then one line per row. Doubles use the shortest round-trip
// representation so equal records produce equal bytes.
void write_csv(std::ostream& out, const ExperimentRecord& record);

// Writes the CSV to `path` and the provenance (parameters, warnings,
// version, UTC timestamp) to `path` + ".json".
void write_record(const std::filesystem::path& path, const ExperimentRecord& record);

std::string format_number(double value);

}  // namespace subfid

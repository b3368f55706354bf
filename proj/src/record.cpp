#include "subfid/record.hpp"

#include <charconv>
#include <chrono>
#include <ctime>
#include <fstream>

#include "json.hpp"
#include "subfid/errors.hpp"

namespace subfid {

std::size_t ExperimentRecord::column(std::string_view name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return i;
  }
  throw ArgumentError("ExperimentRecord: no column " + std::string(name));
}

double ExperimentRecord::number(std::size_t row, std::string_view name) const {
  const Cell& c = rows.at(row).at(column(name));
  if (const auto* d = std::get_if<double>(&c)) return *d;
  if (const auto* i = std::get_if<std::int64_t>(&c)) return static_cast<double>(*i);
  throw ArgumentError("ExperimentRecord: column " + std::string(name) + " is text");
}

const std::string& ExperimentRecord::text(std::size_t row, std::string_view name) const {
  const Cell& c = rows.at(row).at(column(name));
  if (const auto* s = std::get_if<std::string>(&c)) return *s;
  throw ArgumentError("ExperimentRecord: column " + std::string(name) + " is numeric");
}

void ExperimentRecord::set(std::string key, std::string value) {
  for (auto& [k, v] : parameters) {
    if (k == key) {
      v = std::move(value);
      return;
    }
  }
  parameters.emplace_back(std::move(key), std::move(value));
}

const std::string* ExperimentRecord::parameter(std::string_view key) const {
  for (const auto& [k, v] : parameters) {
    if (k == key) return &v;
  }
  return nullptr;
}

std::string format_number(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

void write_csv(std::ostream& out, const ExperimentRecord& record) {
  for (std::size_t i = 0; i < record.columns.size(); ++i) {
    out << (i ? "," : "") << record.columns[i];
  }
  out << '\n';
  for (const auto& row : record.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      std::visit(
          [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>) {
              out << format_number(v);
            } else {
              out << v;
            }
          },
          row[i]);
    }
    out << '\n';
  }
}

void write_record(const std::filesystem::path& path, const ExperimentRecord& record) {
  {
    std::ofstream out(path, std::ios::trunc);
    write_csv(out, record);
    if (!out) throw ArgumentError("write_record: cannot write " + path.string());
  }
  nlohmann::ordered_json meta;
  meta["experiment"] = record.experiment;
  meta["version"] = kVersion;
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  meta["timestamp"] = stamp;
  meta["parameters"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : record.parameters) meta["parameters"][k] = v;
  meta["warnings"] = record.warnings;
  meta["rows"] = record.rows.size();
  std::ofstream out(path.string() + ".json", std::ios::trunc);
  out << meta.dump(2) << '\n';
  if (!out) throw ArgumentError("write_record: cannot write provenance");
}

}  // namespace subfid

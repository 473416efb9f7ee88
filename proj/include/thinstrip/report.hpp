#pragma once

// Tabular results plus a JSON summary, written as CSV (+ sidecar summary) or
// as one JSON document. Output depends only on the report contents.

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace thinstrip {

using Cell = std::variant<double, std::int64_t, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> row);
  std::size_t column(const std::string& name) const;
  double number(std::size_t row, const std::string& name) const;
  std::string text(std::size_t row, const std::string& name) const;
};

struct Report {
  std::string command;
  Table table;
  /// Command-specific results; the schema wrapper is added on output.
  nlohmann::json results = nlohmann::json::object();
  /// Effective configuration, embedded verbatim.
  nlohmann::json config = nlohmann::json::object();
};

inline constexpr const char* kSummarySchema = "thinstrip.summary/1";

std::string render_csv(const Table& table);
nlohmann::json summary_document(const Report& report);
/// Single JSON document with the rows and the summary.
std::string render_json(const Report& report);

/// csv: table at `path` and the summary next to it as <stem>.summary.json.
/// json: one document at `path`. Returns the files written.
std::vector<std::filesystem::path> emit_report(const Report& report, const std::string& format,
                                               const std::filesystem::path& path);

/// Throws ErrorKind::Config describing the first schema violation.
void validate_summary(const nlohmann::json& summary);

} // namespace thinstrip

#include "thinstrip/report.hpp"

#include "thinstrip/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

namespace thinstrip {

namespace {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

nlohmann::json cell_json(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return std::isfinite(*d) ? nlohmann::json(*d) : nlohmann::json();
  if (const auto* i = std::get_if<std::int64_t>(&c)) return *i;
  return std::get<std::string>(c);
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "cannot open " + path.string() + " for writing");
  out << text;
  out.flush();
  if (!out) fail(ErrorKind::Io, "failed writing " + path.string());
}

[[noreturn]] void schema_error(const std::string& what) { fail(ErrorKind::Config, "summary schema: " + what); }

} // namespace

void Table::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size())
    fail(ErrorKind::Parameter, "row has " + std::to_string(row.size()) + " cells, table has " +
                                   std::to_string(columns.size()) + " columns");
  rows.push_back(std::move(row));
}

std::size_t Table::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return i;
  fail(ErrorKind::Index, "no column named " + name);
}

double Table::number(std::size_t row, const std::string& name) const {
  if (row >= rows.size()) fail(ErrorKind::Index, "row " + std::to_string(row) + " out of range");
  const Cell& c = rows[row][column(name)];
  if (const auto* d = std::get_if<double>(&c)) return *d;
  if (const auto* i = std::get_if<std::int64_t>(&c)) return static_cast<double>(*i);
  fail(ErrorKind::Parameter, "column " + name + " is not numeric");
}

std::string Table::text(std::size_t row, const std::string& name) const {
  if (row >= rows.size()) fail(ErrorKind::Index, "row " + std::to_string(row) + " out of range");
  const Cell& c = rows[row][column(name)];
  if (const auto* d = std::get_if<double>(&c)) return format_number(*d);
  if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  return std::get<std::string>(c);
}

std::string render_csv(const Table& table) {
  std::string out;
  for (std::size_t i = 0; i < table.columns.size(); ++i) out += (i ? "," : "") + csv_field(table.columns[i]);
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      if (const auto* d = std::get_if<double>(&row[i])) out += format_number(*d);
      else if (const auto* n = std::get_if<std::int64_t>(&row[i])) out += std::to_string(*n);
      else out += csv_field(std::get<std::string>(row[i]));
    }
    out += '\n';
  }
  return out;
}

nlohmann::json summary_document(const Report& report) {
  nlohmann::json doc;
  doc["schema"] = kSummarySchema;
  doc["command"] = report.command;
  doc["columns"] = report.table.columns;
  doc["row_count"] = report.table.rows.size();
  doc["config"] = report.config;
  doc["results"] = report.results;
  return doc;
}

std::string render_json(const Report& report) {
  nlohmann::json doc = summary_document(report);
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : report.table.rows) {
    nlohmann::json r = nlohmann::json::object();
    for (std::size_t i = 0; i < row.size(); ++i) r[report.table.columns[i]] = cell_json(row[i]);
    rows.push_back(std::move(r));
  }
  doc["rows"] = std::move(rows);
  return doc.dump(2) + '\n';
}

std::vector<std::filesystem::path> emit_report(const Report& report, const std::string& format,
                                               const std::filesystem::path& path) {
  if (report.table.rows.empty()) fail(ErrorKind::Parameter, "report has no records");
  if (path.empty()) fail(ErrorKind::Io, "no output path given");
  if (format == "csv") {
    std::filesystem::path sidecar = path;
    sidecar.replace_extension(".summary.json");
    if (sidecar == path) fail(ErrorKind::Io, "output path " + path.string() + " collides with its summary file");
    write_file(path, render_csv(report.table));
    write_file(sidecar, summary_document(report).dump(2) + '\n');
    return {path, sidecar};
  }
  if (format == "json") {
    write_file(path, render_json(report));
    return {path};
  }
  fail(ErrorKind::Config, "unknown report format '" + format + "'");
}

void validate_summary(const nlohmann::json& s) {
  if (!s.is_object()) schema_error("document is not an object");
  for (const char* key : {"schema", "command", "columns", "row_count", "config", "results"})
    if (!s.contains(key)) schema_error(std::string("missing '") + key + "'");
  if (s["schema"] != kSummarySchema) schema_error("unexpected schema tag");
  if (!s["command"].is_string() || s["command"].get<std::string>().empty()) schema_error("command must be a name");
  if (!s["columns"].is_array() || s["columns"].empty()) schema_error("columns must be a non-empty array");
  for (const auto& c : s["columns"])
    if (!c.is_string()) schema_error("column names must be strings");
  if (!s["row_count"].is_number_unsigned()) schema_error("row_count must be a non-negative integer");
  if (!s["results"].is_object()) schema_error("results must be an object");
  const auto& cfg = s["config"];
  if (!cfg.is_object()) schema_error("config must be an object");
  for (const auto& [section, keys] : cfg.items()) {
    if (!keys.is_object()) schema_error("config section " + section + " must be an object");
    for (const auto& [key, value] : keys.items())
      if (!value.is_string()) schema_error("config value " + section + "." + key + " must be a string");
  }
  if (!cfg.contains("profile") || !cfg["profile"].contains("kind")) schema_error("config lacks profile.kind");
  if (s.contains("rows")) {
    if (!s["rows"].is_array() || s["rows"].size() != s["row_count"].get<std::size_t>())
      schema_error("rows must be an array of row_count entries");
    for (const auto& r : s["rows"]) {
      if (!r.is_object() || r.size() != s["columns"].size()) schema_error("every row needs one entry per column");
      for (const auto& c : s["columns"])
        if (!r.contains(c.get<std::string>())) schema_error("row lacks column " + c.get<std::string>());
    }
  }
}

} // namespace thinstrip

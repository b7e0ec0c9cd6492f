#include "fastsize/database.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>

#include "fastsize/document.hpp"
#include "fastsize/error.hpp"

#ifndef FASTSIZE_DATA_DIR
#define FASTSIZE_DATA_DIR "data"
#endif

namespace fastsize {

std::optional<double> Record::get(std::string_view column) const {
  auto it = values.find(std::string(column));
  if (it == values.end()) return std::nullopt;
  return it->second;
}

std::string Record::label() const {
  auto it = text.find("name");
  return it != text.end() ? it->second : "row " + std::to_string(source_row);
}

bool DataTable::has_column(std::string_view name) const {
  return std::any_of(columns.begin(), columns.end(), [&](const ColumnInfo& c) { return c.name == name; });
}

DataTable DataTable::filtered_by_type(std::string_view type) const {
  DataTable out;
  out.kind = kind;
  out.columns = columns;
  for (const auto& r : records) {
    auto it = r.text.find("type");
    if (it != r.text.end() && it->second == type) out.records.push_back(r);
  }
  return out;
}

const std::vector<ColumnInfo>& known_columns(TableKind kind) {
  static const std::vector<ColumnInfo> aircraft = {
      {"name", "", "aircraft designation", false},
      {"type", "", "propulsion class: turboprop, turbofan, electric", false},
      {"mtow_kg", "kg", "maximum takeoff mass", true},
      {"empty_mass_kg", "kg", "operating empty mass", true},
      {"payload_kg", "kg", "maximum payload", true},
      {"range_m", "m", "range at maximum payload", true},
      {"wing_area_m2", "m2", "wing reference area", true},
      {"power_w", "W", "total installed shaft power", true},
      {"thrust_n", "N", "total installed static thrust", true},
  };
  static const std::vector<ColumnInfo> engines = {
      {"name", "", "engine designation", false},
      {"type", "", "turboprop, turbofan, electric_motor", false},
      {"rated_power_w", "W", "rated takeoff shaft power", true},
      {"rated_thrust_n", "N", "rated takeoff static thrust", true},
      {"dry_mass_kg", "kg", "dry mass", true},
  };
  return kind == TableKind::aircraft ? aircraft : engines;
}

namespace {

std::vector<std::string> split_csv_line(std::string_view line, const std::string& where) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cell.push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cell.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(std::move(cell));
      cell.clear();
    } else if (c != '\r') {
      cell.push_back(c);
    }
  }
  if (quoted) throw ParseError(where + ": unterminated quoted cell");
  cells.push_back(std::move(cell));
  return cells;
}

std::string trim(std::string s) {
  auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

bool is_key_present(const Record& r, TableKind kind) {
  if (kind == TableKind::aircraft) return r.values.count("mtow_kg") > 0;
  return r.values.count("rated_power_w") > 0 || r.values.count("rated_thrust_n") > 0;
}

}  // namespace

DataTable parse_table(std::string_view csv, const std::string& origin) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= csv.size()) {
    std::size_t end = csv.find('\n', start);
    if (end == std::string_view::npos) end = csv.size();
    lines.push_back(csv.substr(start, end - start));
    start = end + 1;
  }
  auto blank = [](std::string_view l) {
    return std::all_of(l.begin(), l.end(), [](unsigned char c) { return std::isspace(c); });
  };
  while (!lines.empty() && blank(lines.back())) lines.pop_back();
  if (lines.empty()) throw ParseError(origin + ": no records (empty file)");

  std::vector<std::string> header = split_csv_line(lines[0], origin + ":1");
  for (auto& h : header) h = trim(h);
  if (!header.empty() && header[0].rfind("\xEF\xBB\xBF", 0) == 0) header[0].erase(0, 3);

  DataTable table;
  table.kind = std::find(header.begin(), header.end(), "mtow_kg") != header.end() ? TableKind::aircraft
                                                                                     : TableKind::engines;
  const auto& catalogue = known_columns(table.kind);
  for (const auto& h : header) {
    auto it = std::find_if(catalogue.begin(), catalogue.end(), [&](const ColumnInfo& c) { return c.name == h; });
    if (it == catalogue.end()) throw ParseError(origin + ":1: unknown column '" + h + "'");
    if (table.has_column(h)) throw ParseError(origin + ":1: duplicate column '" + h + "'");
    table.columns.push_back(*it);
  }
  if (table.kind == TableKind::engines && !table.has_column("rated_power_w") && !table.has_column("rated_thrust_n")) {
    throw ParseError(origin + ":1: table has neither mtow_kg (aircraft) nor rated_power_w/rated_thrust_n (engines)");
  }

  for (std::size_t li = 1; li < lines.size(); ++li) {
    if (blank(lines[li])) continue;
    std::string where = origin + ":" + std::to_string(li + 1);
    auto cells = split_csv_line(lines[li], where);
    if (cells.size() != table.columns.size()) {
      throw ParseError(where + ": expected " + std::to_string(table.columns.size()) + " cells, got " +
                       std::to_string(cells.size()));
    }
    Record rec;
    rec.source_row = static_cast<int>(li);
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const ColumnInfo& col = table.columns[c];
      std::string cell = trim(cells[c]);
      if (cell.empty()) continue;
      if (!col.numeric) {
        rec.text[col.name] = cell;
        continue;
      }
      char* end = nullptr;
      double v = std::strtod(cell.c_str(), &end);
      if (end != cell.c_str() + cell.size() || !std::isfinite(v)) {
        throw ParseError(where + ": non-numeric value '" + cell + "' in column '" + col.name + "'");
      }
      if (v < 0.0) {
        throw ValidationError(where + " (data row " + std::to_string(li) + "): negative value " + cell +
                              " in column '" + col.name + "'");
      }
      rec.values[col.name] = v;
    }
    if (!is_key_present(rec, table.kind)) {
      ++table.dropped_rows;
      continue;
    }
    table.records.push_back(std::move(rec));
  }
  if (table.records.empty()) throw ParseError(origin + ": no records");
  return table;
}

DataTable load_table(const std::string& path) { return parse_table(read_text_file(path), path); }

HistoricalDatabase load_database(const std::string& directory) {
  namespace fs = std::filesystem;
  HistoricalDatabase db;
  db.aircraft = load_table((fs::path(directory) / "aircraft.csv").string());
  db.engines = load_table((fs::path(directory) / "engines.csv").string());
  if (db.aircraft.kind != TableKind::aircraft) throw ParseError(directory + "/aircraft.csv: not an aircraft table");
  if (db.engines.kind != TableKind::engines) throw ParseError(directory + "/engines.csv: not an engine table");
  return db;
}

std::string default_database_directory() {
  if (const char* env = std::getenv("FASTSIZE_DB"); env != nullptr && *env != '\0') return env;
  return FASTSIZE_DATA_DIR;
}

}  // namespace fastsize

#pragma once
// Bundled historical aircraft and engine data.
//
// CSV schema: one header row of snake_case column names carrying their unit
// as a suffix (mtow_kg, range_m, rated_power_w, ...), UTF-8, an empty cell
// means "missing". `name` and `type` are text columns; everything else is
// numeric. The values are approximate public figures.

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fastsize {

enum class TableKind { aircraft, engines };

struct ColumnInfo {
  std::string name;
  std::string unit;  // empty for text and dimensionless columns
  std::string description;
  bool numeric = true;
};

struct Record {
  int source_row = 0;  // 1-based data row in the CSV (header excluded)
  std::map<std::string, std::string> text;
  std::map<std::string, double> values;  // absent key = missing cell

  std::optional<double> get(std::string_view column) const;
  std::string label() const;
};

struct DataTable {
  TableKind kind = TableKind::aircraft;
  std::vector<ColumnInfo> columns;
  std::vector<Record> records;
  int dropped_rows = 0;  // rows without their key column

  bool has_column(std::string_view name) const;
  // Records whose `type` column equals `type`.
  DataTable filtered_by_type(std::string_view type) const;
};

struct HistoricalDatabase {
  DataTable aircraft;
  DataTable engines;
};

// The column catalogue for a table kind; columns outside it are rejected.
const std::vector<ColumnInfo>& known_columns(TableKind kind);

// Parses CSV text. The table kind is inferred from the header (`mtow_kg`
// marks an aircraft table). `origin` prefixes error messages.
DataTable parse_table(std::string_view csv, const std::string& origin = "csv");
DataTable load_table(const std::string& path);

// Loads aircraft.csv and engines.csv from a directory.
HistoricalDatabase load_database(const std::string& directory);

// Directory of the bundled database: $FASTSIZE_DB when set, otherwise the
// data directory the project was built with.
std::string default_database_directory();

}  // namespace fastsize

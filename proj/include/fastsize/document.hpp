#pragma once
// Key/value configuration documents.
//
// The input files (aircraft, mission, architecture, geometry template) and
// the structured reports share one text format: a small subset of TOML.
//
//   # comment
//   key = 1.5                 number
//   key = "5000 N/m2"         string (quantities carry their unit inline)
//   key = true                boolean
//   key = [1, 2, "a"]         array (may span lines)
//   key = { a = 1, b = 2 }    inline table
//   [section]                 table
//   [section.sub]             nested table
//   [[item]]                  append a table to the array "item"
//
// Every value remembers the line it came from so schema readers can report
// errors with context.

#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "fastsize/error.hpp"

namespace fastsize {

struct Value;

struct Table {
  std::vector<std::pair<std::string, Value>> entries;
  int line = 0;

  const Value* find(std::string_view key) const;
  Value* find(std::string_view key);
  bool contains(std::string_view key) const { return find(key) != nullptr; }
  // Throws ParseError if the key already exists.
  Value& insert(std::string key, Value value);
  // Overwrites an existing key or appends a new one; for document builders.
  void set(std::string key, Value value);
};

using Array = std::vector<Value>;

struct Value {
  std::variant<double, std::string, bool, Array, Table> data;
  int line = 0;

  Value() : data(0.0) {}
  Value(double v) : data(v) {}
  Value(int v) : data(static_cast<double>(v)) {}
  Value(std::string v) : data(std::move(v)) {}
  Value(const char* v) : data(std::string(v)) {}
  Value(bool v) : data(v) {}
  Value(Array v) : data(std::move(v)) {}
  Value(Table v) : data(std::move(v)) {}

  bool is_number() const { return std::holds_alternative<double>(data); }
  bool is_string() const { return std::holds_alternative<std::string>(data); }
  bool is_bool() const { return std::holds_alternative<bool>(data); }
  bool is_array() const { return std::holds_alternative<Array>(data); }
  bool is_table() const { return std::holds_alternative<Table>(data); }

  std::string_view type_name() const;
};

bool operator==(const Value& a, const Value& b);
bool operator==(const Table& a, const Table& b);

Table parse_document(std::string_view text);
std::string write_document(const Table& root);

// Reads a whole file; throws Error naming the path when it cannot be opened.
std::string read_text_file(const std::string& path);

// Schema helper: typed access to one table that remembers which keys were
// read so finish() can reject anything left over. Error messages are
// prefixed with the table's context string ("aircraft", "segment 2", ...).
class TableReader {
 public:
  TableReader(const Table& table, std::string context);

  bool has(std::string_view key) const;
  const Value* get(std::string_view key);
  const Value& require(std::string_view key);

  std::string require_string(std::string_view key);
  std::string string_or(std::string_view key, std::string fallback);
  double require_number(std::string_view key);
  bool bool_or(std::string_view key, bool fallback);
  const Table& require_table(std::string_view key);
  const Table* optional_table(std::string_view key);
  // Array of tables ([[key]] sections). Absent key gives an empty list.
  std::vector<const Table*> table_array(std::string_view key);

  // Throws ParseError naming the first unread key.
  void finish() const;

  [[noreturn]] void fail(std::string_view key, const std::string& message) const;
  const std::string& context() const { return context_; }
  int line_of(std::string_view key) const;

 private:
  const Table& table_;
  std::string context_;
  std::vector<std::string> seen_;
};

}  // namespace fastsize

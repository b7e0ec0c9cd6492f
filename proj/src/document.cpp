#include "fastsize/document.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace fastsize {

const Value* Table::find(std::string_view key) const {
  for (const auto& [k, v] : entries) {
    if (k == key) return &v;
  }
  return nullptr;
}

Value* Table::find(std::string_view key) {
  for (auto& [k, v] : entries) {
    if (k == key) return &v;
  }
  return nullptr;
}

Value& Table::insert(std::string key, Value value) {
  if (find(key) != nullptr) {
    throw ParseError("line " + std::to_string(value.line) + ": duplicate key '" + key + "'");
  }
  entries.emplace_back(std::move(key), std::move(value));
  return entries.back().second;
}

void Table::set(std::string key, Value value) {
  if (Value* existing = find(key)) {
    *existing = std::move(value);
    return;
  }
  entries.emplace_back(std::move(key), std::move(value));
}

std::string_view Value::type_name() const {
  switch (data.index()) {
    case 0: return "number";
    case 1: return "string";
    case 2: return "boolean";
    case 3: return "array";
    default: return "table";
  }
}

bool operator==(const Table& a, const Table& b) {
  if (a.entries.size() != b.entries.size()) return false;
  for (const auto& [key, value] : a.entries) {
    const Value* other = b.find(key);
    if (other == nullptr || !(value == *other)) return false;
  }
  return true;
}

bool operator==(const Value& a, const Value& b) { return a.data == b.data; }

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Table run() {
    Table root;
    root.line = 1;
    Table* current = &root;
    while (!at_end()) {
      skip_blank();
      if (at_end()) break;
      char c = peek();
      if (c == '\n') {
        advance();
        continue;
      }
      if (c == '#') {
        skip_comment();
        continue;
      }
      if (c == '[') {
        current = header(root);
      } else {
        key_value(*current);
      }
      end_of_line();
    }
    return root;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;

  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return at_end() ? '\0' : text_[pos_]; }
  char advance() {
    char c = text_[pos_++];
    if (c == '\n') ++line_;
    return c;
  }

  [[noreturn]] void fail(const std::string& message) const {
    throw ParseError("line " + std::to_string(line_) + ": " + message);
  }

  void skip_blank() {
    while (!at_end() && (peek() == ' ' || peek() == '\t' || peek() == '\r')) ++pos_;
  }

  void skip_comment() {
    while (!at_end() && peek() != '\n') ++pos_;
  }

  // Inside arrays and inline tables newlines and comments are whitespace.
  void skip_space_and_newlines() {
    for (;;) {
      skip_blank();
      if (peek() == '\n') {
        advance();
      } else if (peek() == '#') {
        skip_comment();
      } else {
        return;
      }
    }
  }

  void end_of_line() {
    skip_blank();
    if (peek() == '#') skip_comment();
    if (at_end()) return;
    if (peek() != '\n') fail(std::string("unexpected '") + peek() + "' after value");
    advance();
  }

  static bool bare_key_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
  }

  std::string key() {
    skip_blank();
    if (peek() == '"') return quoted_string();
    std::size_t start = pos_;
    while (!at_end() && bare_key_char(peek())) ++pos_;
    if (pos_ == start) fail("expected a key");
    return std::string(text_.substr(start, pos_ - start));
  }

  std::vector<std::string> dotted_key() {
    std::vector<std::string> parts{key()};
    skip_blank();
    while (peek() == '.') {
      ++pos_;
      parts.push_back(key());
      skip_blank();
    }
    return parts;
  }

  Table* header(Table& root) {
    ++pos_;
    bool array_of_tables = peek() == '[';
    if (array_of_tables) ++pos_;
    int header_line = line_;
    auto path = dotted_key();
    skip_blank();
    if (peek() != ']') fail("expected ']' to close table header");
    ++pos_;
    if (array_of_tables) {
      if (peek() != ']') fail("expected ']]' to close array-of-tables header");
      ++pos_;
    }

    Table* table = &root;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) table = descend(*table, path[i], header_line);

    const std::string& last = path.back();
    Value* existing = table->find(last);
    if (array_of_tables) {
      if (existing == nullptr) {
        Value arr{Array{}};
        arr.line = header_line;
        existing = &table->insert(last, std::move(arr));
      }
      auto* arr = std::get_if<Array>(&existing->data);
      if (arr == nullptr || (!arr->empty() && !arr->back().is_table())) {
        fail("'" + last + "' is not an array of tables");
      }
      Table fresh;
      fresh.line = header_line;
      Value v{std::move(fresh)};
      v.line = header_line;
      arr->push_back(std::move(v));
      return &std::get<Table>(arr->back().data);
    }
    if (existing != nullptr) {
      auto* t = std::get_if<Table>(&existing->data);
      if (t == nullptr) fail("'" + last + "' is already defined as a " + std::string(existing->type_name()));
      return t;
    }
    Table fresh;
    fresh.line = header_line;
    Value v{std::move(fresh)};
    v.line = header_line;
    return &std::get<Table>(table->insert(last, std::move(v)).data);
  }

  // Walks into a table, or into the last element of an array of tables.
  Table* descend(Table& table, const std::string& name, int header_line) {
    Value* v = table.find(name);
    if (v == nullptr) {
      Table fresh;
      fresh.line = header_line;
      Value nv{std::move(fresh)};
      nv.line = header_line;
      return &std::get<Table>(table.insert(name, std::move(nv)).data);
    }
    if (auto* t = std::get_if<Table>(&v->data)) return t;
    if (auto* arr = std::get_if<Array>(&v->data); arr != nullptr && !arr->empty() && arr->back().is_table()) {
      return &std::get<Table>(arr->back().data);
    }
    fail("'" + name + "' is not a table");
  }

  void key_value(Table& table) {
    int key_line = line_;
    auto path = dotted_key();
    skip_blank();
    if (peek() != '=') fail("expected '=' after key '" + path.back() + "'");
    ++pos_;
    skip_blank();
    Value v = value();
    v.line = key_line;
    Table* target = &table;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) target = descend(*target, path[i], key_line);
    if (target->find(path.back()) != nullptr) fail("duplicate key '" + path.back() + "'");
    target->insert(path.back(), std::move(v));
  }

  Value value() {
    int value_line = line_;
    Value v;
    char c = peek();
    if (c == '"') {
      v = Value{quoted_string()};
    } else if (c == '[') {
      v = Value{array()};
    } else if (c == '{') {
      v = Value{inline_table()};
    } else if (text_.substr(pos_, 4) == "true" && !bare_key_char(peek_at(4))) {
      pos_ += 4;
      v = Value{true};
    } else if (text_.substr(pos_, 5) == "false" && !bare_key_char(peek_at(5))) {
      pos_ += 5;
      v = Value{false};
    } else {
      v = Value{number()};
    }
    v.line = value_line;
    return v;
  }

  char peek_at(std::size_t offset) const {
    return pos_ + offset < text_.size() ? text_[pos_ + offset] : '\0';
  }

  double number() {
    std::size_t start = pos_;
    while (!at_end()) {
      char c = peek();
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '+' || c == '-' || c == '.' || c == '_') {
        ++pos_;
      } else {
        break;
      }
    }
    std::string token(text_.substr(start, pos_ - start));
    token.erase(std::remove(token.begin(), token.end(), '_'), token.end());
    if (token.empty()) fail("expected a value");
    char* end = nullptr;
    double v = std::strtod(token.c_str(), &end);
    if (end != token.c_str() + token.size() || !std::isfinite(v)) {
      fail("invalid value '" + token + "' (strings must be quoted)");
    }
    return v;
  }

  std::string quoted_string() {
    ++pos_;
    std::string out;
    for (;;) {
      if (at_end() || peek() == '\n') fail("unterminated string");
      char c = advance();
      if (c == '"') break;
      if (c != '\\') {
        out.push_back(c);
        continue;
      }
      if (at_end()) fail("unterminated escape");
      char e = advance();
      switch (e) {
        case 'n': out.push_back('\n'); break;
        case 't': out.push_back('\t'); break;
        case '"': out.push_back('"'); break;
        case '\\': out.push_back('\\'); break;
        default: fail(std::string("unknown escape '\\") + e + "'");
      }
    }
    return out;
  }

  Array array() {
    ++pos_;
    Array out;
    for (;;) {
      skip_space_and_newlines();
      if (peek() == ']') {
        ++pos_;
        return out;
      }
      if (at_end()) fail("unterminated array");
      out.push_back(value());
      skip_space_and_newlines();
      if (peek() == ',') {
        ++pos_;
      } else if (peek() != ']') {
        fail("expected ',' or ']' in array");
      }
    }
  }

  Table inline_table() {
    Table out;
    out.line = line_;
    ++pos_;
    for (;;) {
      skip_space_and_newlines();
      if (peek() == '}') {
        ++pos_;
        return out;
      }
      if (at_end()) fail("unterminated inline table");
      key_value_inline(out);
      skip_space_and_newlines();
      if (peek() == ',') {
        ++pos_;
      } else if (peek() != '}') {
        fail("expected ',' or '}' in inline table");
      }
    }
  }

  void key_value_inline(Table& table) {
    int key_line = line_;
    std::string k = key();
    skip_blank();
    if (peek() != '=') fail("expected '=' after key '" + k + "'");
    ++pos_;
    skip_blank();
    Value v = value();
    v.line = key_line;
    if (table.find(k) != nullptr) fail("duplicate key '" + k + "'");
    table.insert(std::move(k), std::move(v));
  }
};

bool is_bare_key(const std::string& key) {
  return !key.empty() && std::all_of(key.begin(), key.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
  });
}

std::string format_key(const std::string& key) {
  if (is_bare_key(key)) return key;
  std::string out = "\"";
  for (char c : key) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out + "\"";
}

std::string format_scalar(const Value& v);

std::string format_inline(const Value& v) {
  if (const auto* arr = std::get_if<Array>(&v.data)) {
    std::string out = "[";
    for (std::size_t i = 0; i < arr->size(); ++i) {
      if (i > 0) out += ", ";
      out += format_inline((*arr)[i]);
    }
    return out + "]";
  }
  if (const auto* t = std::get_if<Table>(&v.data)) {
    std::string out = "{";
    for (std::size_t i = 0; i < t->entries.size(); ++i) {
      out += i > 0 ? ", " : " ";
      out += format_key(t->entries[i].first) + " = " + format_inline(t->entries[i].second);
    }
    return out + (t->entries.empty() ? "}" : " }");
  }
  return format_scalar(v);
}

std::string format_scalar(const Value& v) {
  if (const auto* d = std::get_if<double>(&v.data)) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", *d);
    return buf;
  }
  if (const auto* b = std::get_if<bool>(&v.data)) return *b ? "true" : "false";
  const auto& s = std::get<std::string>(v.data);
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out.push_back(c);
    }
  }
  return out + "\"";
}

bool is_table_array(const Value& v) {
  const auto* arr = std::get_if<Array>(&v.data);
  return arr != nullptr && !arr->empty() &&
         std::all_of(arr->begin(), arr->end(), [](const Value& e) { return e.is_table(); });
}

void write_entries(std::ostringstream& out, const Table& table) {
  for (const auto& [key, value] : table.entries) {
    out << format_key(key) << " = " << format_inline(value) << '\n';
  }
}

}  // namespace

Table parse_document(std::string_view text) { return Parser(text).run(); }

std::string write_document(const Table& root) {
  std::ostringstream out;
  Table plain;
  for (const auto& [key, value] : root.entries) {
    if (!value.is_table() && !is_table_array(value)) plain.entries.emplace_back(key, value);
  }
  write_entries(out, plain);
  for (const auto& [key, value] : root.entries) {
    if (const auto* t = std::get_if<Table>(&value.data)) {
      out << "\n[" << format_key(key) << "]\n";
      write_entries(out, *t);
    } else if (is_table_array(value)) {
      for (const auto& element : std::get<Array>(value.data)) {
        out << "\n[[" << format_key(key) << "]]\n";
        write_entries(out, std::get<Table>(element.data));
      }
    }
  }
  return out.str();
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TableReader::TableReader(const Table& table, std::string context)
    : table_(table), context_(std::move(context)) {}

bool TableReader::has(std::string_view key) const { return table_.contains(key); }

const Value* TableReader::get(std::string_view key) {
  const Value* v = table_.find(key);
  if (v != nullptr && std::find(seen_.begin(), seen_.end(), key) == seen_.end()) {
    seen_.emplace_back(key);
  }
  return v;
}

int TableReader::line_of(std::string_view key) const {
  const Value* v = table_.find(key);
  return v != nullptr ? v->line : table_.line;
}

void TableReader::fail(std::string_view key, const std::string& message) const {
  throw ParseError(context_ + " (line " + std::to_string(line_of(key)) + "): key '" + std::string(key) +
                   "': " + message);
}

const Value& TableReader::require(std::string_view key) {
  const Value* v = get(key);
  if (v == nullptr) {
    throw ParseError(context_ + " (line " + std::to_string(table_.line) + "): missing required key '" +
                     std::string(key) + "'");
  }
  return *v;
}

std::string TableReader::require_string(std::string_view key) {
  const Value& v = require(key);
  if (!v.is_string()) fail(key, "expected a string, got a " + std::string(v.type_name()));
  return std::get<std::string>(v.data);
}

std::string TableReader::string_or(std::string_view key, std::string fallback) {
  return has(key) ? require_string(key) : std::move(fallback);
}

double TableReader::require_number(std::string_view key) {
  const Value& v = require(key);
  if (!v.is_number()) fail(key, "expected a number, got a " + std::string(v.type_name()));
  return std::get<double>(v.data);
}

bool TableReader::bool_or(std::string_view key, bool fallback) {
  const Value* v = get(key);
  if (v == nullptr) return fallback;
  if (!v->is_bool()) fail(key, "expected true or false");
  return std::get<bool>(v->data);
}

const Table& TableReader::require_table(std::string_view key) {
  const Value& v = require(key);
  if (!v.is_table()) fail(key, "expected a table, got a " + std::string(v.type_name()));
  return std::get<Table>(v.data);
}

const Table* TableReader::optional_table(std::string_view key) {
  return has(key) ? &require_table(key) : nullptr;
}

std::vector<const Table*> TableReader::table_array(std::string_view key) {
  std::vector<const Table*> out;
  const Value* v = get(key);
  if (v == nullptr) return out;
  const auto* arr = std::get_if<Array>(&v->data);
  if (arr == nullptr) fail(key, "expected an array of tables");
  for (const auto& e : *arr) {
    const auto* t = std::get_if<Table>(&e.data);
    if (t == nullptr) fail(key, "expected an array of tables");
    out.push_back(t);
  }
  return out;
}

void TableReader::finish() const {
  for (const auto& [key, value] : table_.entries) {
    if (std::find(seen_.begin(), seen_.end(), key) == seen_.end()) {
      throw ParseError(context_ + " (line " + std::to_string(value.line) + "): unknown key '" + key + "'");
    }
  }
}

}  // namespace fastsize

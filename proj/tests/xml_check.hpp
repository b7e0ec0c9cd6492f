#pragma once
// Minimal XML well-formedness check for the SVG exporters: balanced and
// properly nested tags, quoted attributes, known entities, a single root.
// Returns an empty string when the document is well formed.

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

namespace fastsize::testing {

inline std::string xml_problem(std::string_view doc) {
  std::vector<std::string> stack;
  std::size_t i = 0;
  int roots = 0;
  auto name_char = [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == ':' || c == '.';
  };
  auto check_text = [&](std::string_view text) -> std::string {
    for (std::size_t k = 0; k < text.size(); ++k) {
      if (text[k] == '<') return "stray '<'";
      if (text[k] != '&') continue;
      auto semi = text.find(';', k);
      if (semi == std::string_view::npos) return "unterminated entity";
      std::string_view ent = text.substr(k + 1, semi - k - 1);
      if (ent != "lt" && ent != "gt" && ent != "amp" && ent != "quot" && ent != "apos" && ent.rfind('#', 0) != 0) {
        return "unknown entity &" + std::string(ent) + ";";
      }
    }
    return {};
  };

  while (i < doc.size()) {
    auto lt = doc.find('<', i);
    std::string_view text = doc.substr(i, lt == std::string_view::npos ? std::string_view::npos : lt - i);
    if (auto p = check_text(text); !p.empty()) return p;
    if (stack.empty()) {
      for (char c : text) {
        if (!std::isspace(static_cast<unsigned char>(c))) return "text outside the root element";
      }
    }
    if (lt == std::string_view::npos) break;
    i = lt;
    if (doc.compare(i, 5, "<?xml") == 0) {
      if (i != 0) return "xml declaration not at start";
      auto end = doc.find("?>", i);
      if (end == std::string_view::npos) return "unterminated declaration";
      i = end + 2;
      continue;
    }
    if (doc.compare(i, 4, "<!--") == 0) {
      auto end = doc.find("-->", i);
      if (end == std::string_view::npos) return "unterminated comment";
      i = end + 3;
      continue;
    }
    const bool closing = doc.compare(i, 2, "</") == 0;
    std::size_t k = i + (closing ? 2 : 1);
    std::size_t name_start = k;
    while (k < doc.size() && name_char(doc[k])) ++k;
    if (k == name_start) return "missing tag name";
    std::string name(doc.substr(name_start, k - name_start));
    if (closing) {
      while (k < doc.size() && std::isspace(static_cast<unsigned char>(doc[k]))) ++k;
      if (k >= doc.size() || doc[k] != '>') return "malformed closing tag </" + name;
      if (stack.empty() || stack.back() != name) return "mismatched </" + name + ">";
      stack.pop_back();
      i = k + 1;
      continue;
    }
    // Attributes.
    std::vector<std::string> seen;
    bool self_closing = false;
    while (true) {
      while (k < doc.size() && std::isspace(static_cast<unsigned char>(doc[k]))) ++k;
      if (k >= doc.size()) return "unterminated tag <" + name;
      if (doc[k] == '>') break;
      if (doc.compare(k, 2, "/>") == 0) {
        self_closing = true;
        ++k;
        break;
      }
      std::size_t a = k;
      while (k < doc.size() && name_char(doc[k])) ++k;
      if (k == a) return "bad attribute in <" + name;
      std::string attr(doc.substr(a, k - a));
      for (const auto& s : seen) {
        if (s == attr) return "duplicate attribute " + attr;
      }
      seen.push_back(attr);
      if (k >= doc.size() || doc[k] != '=') return "attribute without value in <" + name;
      ++k;
      if (k >= doc.size() || (doc[k] != '"' && doc[k] != '\'')) return "unquoted attribute in <" + name;
      const char q = doc[k];
      auto end = doc.find(q, k + 1);
      if (end == std::string_view::npos) return "unterminated attribute in <" + name;
      if (auto p = check_text(doc.substr(k + 1, end - k - 1)); !p.empty()) return p;
      k = end + 1;
    }
    if (stack.empty()) ++roots;
    if (!self_closing) stack.push_back(name);
    i = k + 1;
  }
  if (!stack.empty()) return "unclosed <" + stack.back() + ">";
  if (roots != 1) return "expected one root element, found " + std::to_string(roots);
  return {};
}

}  // namespace fastsize::testing

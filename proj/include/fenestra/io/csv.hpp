#pragma once
// RFC 4180 CSV: fields containing commas, quotes or line breaks are quoted,
// embedded quotes doubled.

#include <charconv>
#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

#include "fenestra/error.hpp"

namespace fenestra::io {

using CsvRow = std::vector<std::string>;

inline std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

/// Shortest round-trip decimal form.
inline std::string format_number(double v) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc() ? std::string(buf, p) : std::to_string(v);
}

class CsvWriter {
 public:
  explicit CsvWriter(CsvRow header) : width_(header.size()) { add(header); }

  void add(const CsvRow& row) {
    if (row.size() != width_) throw ValidationError("CSV row has " + std::to_string(row.size()) + " fields, expected " + std::to_string(width_));
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) text_ += ',';
      text_ += csv_escape(row[i]);
    }
    text_ += "\r\n";
  }

  const std::string& str() const { return text_; }

 private:
  std::size_t width_;
  std::string text_;
};

/// Parses a complete CSV document into rows.
inline std::vector<CsvRow> parse_csv(std::string_view text) {
  std::vector<CsvRow> rows;
  CsvRow row;
  std::string field;
  bool quoted = false, field_started = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        if (field_started) throw ParseError("CSV: quote inside unquoted field");
        quoted = field_started = true;
        break;
      case ',':
        row.push_back(std::move(field));
        field.clear();
        field_started = false;
        break;
      case '\r': break;
      case '\n':
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
        row.clear();
        field.clear();
        field_started = false;
        break;
      default:
        field += c;
        field_started = true;
    }
  }
  if (quoted) throw ParseError("CSV: unterminated quoted field");
  if (field_started || !row.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace fenestra::io

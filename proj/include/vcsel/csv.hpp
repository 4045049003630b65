#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "vcsel/relation.hpp"

namespace vcsel {

namespace detail {

inline std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

inline bool parse_value(std::string_view s, Value& out) {
  if (s.empty()) return false;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

inline void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

}  // namespace detail

// Reads a table from CSV text: a header of column names followed by one
// integer row per line. The header must list exactly the schema's names
// in order.
inline Table read_csv(std::istream& in, std::string table_name,
                      const std::vector<ColumnMeta>& schema) {
  std::string line;
  if (!std::getline(in, line)) {
    throw CsvError("missing header line", 0, "");
  }
  detail::strip_cr(line);
  const auto header = detail::split_commas(line);
  if (header.size() != schema.size()) {
    throw CsvError("header has " + std::to_string(header.size()) +
                       " columns, schema expects " +
                       std::to_string(schema.size()),
                   0, "");
  }
  for (std::size_t i = 0; i < schema.size(); ++i) {
    if (header[i] != schema[i].name) {
      throw CsvError("header column " + std::to_string(i + 1) + " is '" +
                         std::string(header[i]) + "', expected '" +
                         schema[i].name + "'",
                     0, schema[i].name);
    }
  }

  std::vector<Value> cells;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    detail::strip_cr(line);
    if (line.empty() && in.peek() == std::char_traits<char>::eof()) break;
    ++row;
    const auto fields = detail::split_commas(line);
    if (fields.size() != schema.size()) {
      throw CsvError("row " + std::to_string(row) + " has " +
                         std::to_string(fields.size()) + " cells, expected " +
                         std::to_string(schema.size()),
                     row, "");
    }
    for (std::size_t i = 0; i < schema.size(); ++i) {
      Value v = 0;
      if (!detail::parse_value(fields[i], v)) {
        throw CsvError("non-integer cell '" + std::string(fields[i]) +
                           "' at row " + std::to_string(row) + ", column " +
                           schema[i].name,
                       row, schema[i].name);
      }
      if (!schema[i].domain.contains(v)) {
        throw CsvError("value " + std::to_string(v) +
                           " outside domain at row " + std::to_string(row) +
                           ", column " + schema[i].name,
                       row, schema[i].name);
      }
      cells.push_back(v);
    }
  }
  return Table(std::move(table_name), schema, std::move(cells));
}

// Loads a CSV file; the table is named after the file stem unless a name is
// given.
inline Table load_csv(const std::filesystem::path& path,
                      const std::vector<ColumnMeta>& schema,
                      std::string table_name = {}) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw CsvError("cannot open '" + path.string() + "'", 0, "");
  }
  if (table_name.empty()) table_name = path.stem().string();
  return read_csv(in, std::move(table_name), schema);
}

// Reads only the header line; used when the schema comes from elsewhere.
inline std::vector<std::string> read_csv_header(
    const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CsvError("cannot open '" + path.string() + "'", 0, "");
  std::string line;
  if (!std::getline(in, line)) throw CsvError("missing header line", 0, "");
  detail::strip_cr(line);
  std::vector<std::string> names;
  for (auto f : detail::split_commas(line)) names.emplace_back(f);
  return names;
}

inline void write_csv(std::ostream& out, const Table& table) {
  const auto cols = table.columns();
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (i) out << ',';
    out << cols[i].name;
  }
  out << '\n';
  for (std::size_t r = 0; r < table.row_count(); ++r) {
    const auto row = table.row(r);
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << row[i];
    }
    out << '\n';
  }
}

inline std::string to_csv(const Table& table) {
  std::ostringstream out;
  write_csv(out, table);
  return out.str();
}

inline void save_csv(const std::filesystem::path& path, const Table& table) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  write_csv(out, table);
}

}  // namespace vcsel

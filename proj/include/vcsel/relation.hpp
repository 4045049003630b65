#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vcsel/errors.hpp"

namespace vcsel {

using Value = std::int64_t;

// Inclusive integer interval [lo, hi].
struct Domain {
  Value lo = 0;
  Value hi = 0;

  bool contains(Value v) const noexcept { return lo <= v && v <= hi; }
  friend bool operator==(const Domain&, const Domain&) = default;
};

inline bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  auto alpha = [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
  };
  auto digit = [](char c) { return c >= '0' && c <= '9'; };
  if (!alpha(s.front())) return false;
  return std::all_of(s.begin(), s.end(),
                     [&](char c) { return alpha(c) || digit(c); });
}

struct ColumnMeta {
  std::string name;
  Domain domain;

  friend bool operator==(const ColumnMeta&, const ColumnMeta&) = default;
};

// Row-major integer table. Validated on construction and immutable after.
class Table {
 public:
  Table(std::string name, std::vector<ColumnMeta> columns,
        std::vector<Value> cells)
      : name_(std::move(name)),
        columns_(std::move(columns)),
        cells_(std::move(cells)) {
    if (!is_identifier(name_)) {
      throw ValidationError("invalid table name '" + name_ + "'");
    }
    if (columns_.empty()) {
      throw ValidationError("table '" + name_ + "' has no columns");
    }
    for (std::size_t i = 0; i < columns_.size(); ++i) {
      const auto& c = columns_[i];
      if (!is_identifier(c.name)) {
        throw ValidationError("invalid column name '" + c.name + "'");
      }
      if (c.domain.lo > c.domain.hi) {
        throw ValidationError("column '" + c.name + "' has empty domain");
      }
      for (std::size_t j = 0; j < i; ++j) {
        if (columns_[j].name == c.name) {
          throw ValidationError("duplicate column '" + c.name + "'");
        }
      }
    }
    if (cells_.size() % columns_.size() != 0) {
      throw ValidationError("cell count is not a multiple of the arity");
    }
    const std::size_t arity = columns_.size();
    for (std::size_t k = 0; k < cells_.size(); ++k) {
      const auto& c = columns_[k % arity];
      if (!c.domain.contains(cells_[k])) {
        throw ValidationError("value " + std::to_string(cells_[k]) +
                              " outside domain of column '" + c.name +
                              "' at row " + std::to_string(k / arity + 1));
      }
    }
  }

  const std::string& name() const noexcept { return name_; }
  std::span<const ColumnMeta> columns() const noexcept { return columns_; }
  std::size_t column_count() const noexcept { return columns_.size(); }
  std::size_t row_count() const noexcept {
    return cells_.size() / columns_.size();
  }
  bool empty() const noexcept { return cells_.empty(); }

  std::span<const Value> row(std::size_t i) const {
    return {cells_.data() + i * columns_.size(), columns_.size()};
  }
  Value at(std::size_t row, std::size_t col) const {
    return cells_[row * columns_.size() + col];
  }
  std::span<const Value> cells() const noexcept { return cells_; }

  std::optional<std::size_t> find_column(std::string_view name) const {
    for (std::size_t i = 0; i < columns_.size(); ++i) {
      if (columns_[i].name == name) return i;
    }
    return std::nullopt;
  }
  std::size_t column_index(std::string_view name) const {
    if (auto i = find_column(name)) return *i;
    throw ValidationError("unknown column '" + std::string(name) +
                          "' in table '" + name_ + "'");
  }

  // Same schema and values; the table name is not compared.
  bool same_contents(const Table& other) const {
    return columns_ == other.columns_ && cells_ == other.cells_;
  }

 private:
  std::string name_;
  std::vector<ColumnMeta> columns_;
  std::vector<Value> cells_;
};

struct TupleRef {
  std::string table;
  std::size_t ordinal = 0;

  friend bool operator==(const TupleRef&, const TupleRef&) = default;
};

// Named collection of shared immutable tables.
class Catalog {
 public:
  Catalog() = default;
  explicit Catalog(std::vector<Table> tables) {
    for (auto& t : tables) add(std::move(t));
  }

  void add(Table table) {
    add(std::make_shared<const Table>(std::move(table)));
  }
  void add(std::shared_ptr<const Table> table) {
    const std::string name = table->name();
    if (!tables_.emplace(name, std::move(table)).second) {
      throw ValidationError("duplicate table '" + name + "'");
    }
  }

  const Table* find(std::string_view name) const {
    auto it = tables_.find(std::string(name));
    return it == tables_.end() ? nullptr : it->second.get();
  }
  const Table& get(std::string_view name) const {
    if (const Table* t = find(name)) return *t;
    throw ValidationError("unknown table '" + std::string(name) + "'");
  }
  std::shared_ptr<const Table> shared(std::string_view name) const {
    auto it = tables_.find(std::string(name));
    if (it == tables_.end()) {
      throw ValidationError("unknown table '" + std::string(name) + "'");
    }
    return it->second;
  }

  std::size_t size() const noexcept { return tables_.size(); }
  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& [name, _] : tables_) out.push_back(name);
    return out;
  }

 private:
  std::map<std::string, std::shared_ptr<const Table>> tables_;
};

}  // namespace vcsel

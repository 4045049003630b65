#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <random>
#include <sstream>
#include <span>
#include <string>
#include <vector>

#include "vcsel/csv.hpp"
#include "vcsel/relation.hpp"

namespace vcsel {

// s tuples drawn from one base table. The tuple stored at ordinal k carries
// sampleindex k + 1, so every index in [1, s] occurs exactly once.
class SampleTable {
 public:
  explicit SampleTable(std::shared_ptr<const Table> rows)
      : rows_(std::move(rows)) {}

  const std::string& base() const noexcept { return rows_->name(); }
  const Table& rows() const noexcept { return *rows_; }
  std::shared_ptr<const Table> shared_rows() const noexcept { return rows_; }
  std::size_t size() const noexcept { return rows_->row_count(); }

  static constexpr std::size_t sampleindex(std::size_t ordinal) noexcept {
    return ordinal + 1;
  }
  std::span<const Value> at_index(std::size_t sampleindex) const {
    return rows_->row(sampleindex - 1);
  }

 private:
  std::shared_ptr<const Table> rows_;
};

class SampleDatabase {
 public:
  SampleDatabase(std::size_t size, std::uint64_t seed,
                 std::vector<SampleTable> tables)
      : size_(size), seed_(seed), tables_(std::move(tables)) {
    for (const auto& t : tables_) {
      if (t.size() != size_) {
        throw ValidationError("sample table '" + t.base() + "' has " +
                              std::to_string(t.size()) + " rows, expected " +
                              std::to_string(size_));
      }
      catalog_.add(t.shared_rows());
    }
  }

  std::size_t size() const noexcept { return size_; }
  std::uint64_t seed() const noexcept { return seed_; }
  const std::vector<SampleTable>& tables() const noexcept { return tables_; }

  // Sample tables under their base-table names, for plan execution.
  const Catalog& catalog() const noexcept { return catalog_; }

  const SampleTable& table(std::string_view base) const {
    for (const auto& t : tables_) {
      if (t.base() == base) return t;
    }
    throw ValidationError("sample has no table '" + std::string(base) + "'");
  }

 private:
  std::size_t size_;
  std::uint64_t seed_;
  std::vector<SampleTable> tables_;
  Catalog catalog_;
};

namespace detail {

// Independent stream per table position, so appending a table leaves the
// draws of the earlier tables unchanged.
inline std::mt19937_64 table_stream(std::uint64_t seed, std::size_t position) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(position)};
  return std::mt19937_64(seq);
}

}  // namespace detail

// Draws s tuples uniformly with replacement from every table; draw i gets
// sampleindex i. Tuples with equal sampleindex across tables form a uniform
// sample of size s of the Cartesian product.
inline SampleDatabase create_sample(
    std::size_t s, const std::vector<std::shared_ptr<const Table>>& tables,
    std::uint64_t seed) {
  if (s < 1) throw ValidationError("sample size must be at least 1");
  std::vector<SampleTable> out;
  out.reserve(tables.size());
  for (std::size_t j = 0; j < tables.size(); ++j) {
    const Table& base = *tables[j];
    if (base.empty()) {
      throw ValidationError("cannot sample empty table '" + base.name() + "'");
    }
    auto rng = detail::table_stream(seed, j);
    std::uniform_int_distribution<std::size_t> pick(0, base.row_count() - 1);
    std::vector<Value> cells;
    cells.reserve(s * base.column_count());
    for (std::size_t i = 0; i < s; ++i) {
      const auto row = base.row(pick(rng));
      cells.insert(cells.end(), row.begin(), row.end());
    }
    std::vector<ColumnMeta> cols(base.columns().begin(), base.columns().end());
    out.emplace_back(std::make_shared<const Table>(base.name(), std::move(cols),
                                                   std::move(cells)));
  }
  return SampleDatabase(s, seed, std::move(out));
}

inline SampleDatabase create_sample(std::size_t s, const Catalog& catalog,
                                    const std::vector<std::string>& names,
                                    std::uint64_t seed) {
  std::vector<std::shared_ptr<const Table>> tables;
  for (const auto& n : names) tables.push_back(catalog.shared(n));
  return create_sample(s, tables, seed);
}

// One tuple per sample table, all carrying the given sampleindex.
inline std::vector<std::span<const Value>> aligned_tuple(
    const SampleDatabase& db, std::size_t sampleindex) {
  if (sampleindex < 1 || sampleindex > db.size()) {
    throw ValidationError("sampleindex " + std::to_string(sampleindex) +
                          " outside [1, " + std::to_string(db.size()) + "]");
  }
  std::vector<std::span<const Value>> out;
  for (const auto& t : db.tables()) out.push_back(t.at_index(sampleindex));
  return out;
}

// On-disk layout: <dir>/manifest.txt plus <dir>/<table>.csv per sample
// table, whose first column is sampleindex.
inline void save_sample(const std::filesystem::path& dir,
                        const SampleDatabase& db) {
  std::filesystem::create_directories(dir);
  std::ofstream manifest(dir / "manifest.txt",
                         std::ios::binary | std::ios::trunc);
  if (!manifest) throw Error("cannot write manifest in " + dir.string());
  manifest << "size=" << db.size() << '\n' << "seed=" << db.seed() << '\n';
  for (const auto& t : db.tables()) {
    manifest << "table=" << t.base() << ' ' << t.base() << ".csv\n";
    for (const auto& c : t.rows().columns()) {
      manifest << "column=" << t.base() << ' ' << c.name << ' ' << c.domain.lo
               << ' ' << c.domain.hi << '\n';
    }
    std::ofstream out(dir / (t.base() + ".csv"),
                      std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write sample table " + t.base());
    out << "sampleindex";
    for (const auto& c : t.rows().columns()) out << ',' << c.name;
    out << '\n';
    for (std::size_t k = 0; k < t.size(); ++k) {
      out << SampleTable::sampleindex(k);
      for (Value v : t.rows().row(k)) out << ',' << v;
      out << '\n';
    }
  }
}

// Reads a sample written by save_sample. Rows may appear in any order in
// the CSV files; the sampleindex column must be a permutation of [1, s].
inline SampleDatabase load_sample(const std::filesystem::path& manifest_path) {
  std::ifstream in(manifest_path, std::ios::binary);
  if (!in) {
    throw ValidationError("cannot open sample manifest '" +
                          manifest_path.string() + "'");
  }
  const auto dir = manifest_path.parent_path();
  std::size_t size = 0;
  std::uint64_t seed = 0;
  struct Entry {
    std::string name, file;
    std::vector<ColumnMeta> columns;
  };
  std::vector<Entry> entries;
  std::string line;
  while (std::getline(in, line)) {
    detail::strip_cr(line);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ValidationError("malformed manifest line '" + line + "'");
    }
    const std::string key = line.substr(0, eq);
    std::istringstream rest(line.substr(eq + 1));
    if (key == "size") {
      rest >> size;
    } else if (key == "seed") {
      rest >> seed;
    } else if (key == "table") {
      Entry e;
      rest >> e.name >> e.file;
      entries.push_back(std::move(e));
    } else if (key == "column") {
      std::string table;
      ColumnMeta c;
      rest >> table >> c.name >> c.domain.lo >> c.domain.hi;
      if (entries.empty() || entries.back().name != table) {
        throw ValidationError("column line for unexpected table '" + table +
                              "'");
      }
      entries.back().columns.push_back(std::move(c));
    } else {
      throw ValidationError("unknown manifest key '" + key + "'");
    }
    if (rest.fail()) {
      throw ValidationError("malformed manifest line '" + line + "'");
    }
  }
  if (size < 1) throw ValidationError("manifest has no valid size");

  std::vector<SampleTable> tables;
  for (const auto& e : entries) {
    std::vector<ColumnMeta> schema;
    schema.push_back({"sampleindex", {1, static_cast<Value>(size)}});
    schema.insert(schema.end(), e.columns.begin(), e.columns.end());
    const Table raw = load_csv(dir / e.file, schema, e.name);
    if (raw.row_count() != size) {
      throw ValidationError("sample table '" + e.name + "' has " +
                            std::to_string(raw.row_count()) +
                            " rows, manifest says " + std::to_string(size));
    }
    const std::size_t arity = e.columns.size();
    std::vector<Value> cells(size * arity);
    std::vector<bool> seen(size, false);
    for (std::size_t r = 0; r < size; ++r) {
      const auto row = raw.row(r);
      const auto idx = static_cast<std::size_t>(row[0]) - 1;
      if (seen[idx]) {
        throw ValidationError("sample table '" + e.name +
                              "' repeats sampleindex " +
                              std::to_string(idx + 1));
      }
      seen[idx] = true;
      std::copy(row.begin() + 1, row.end(), cells.begin() + idx * arity);
    }
    tables.emplace_back(
        std::make_shared<const Table>(e.name, e.columns, std::move(cells)));
  }
  return SampleDatabase(size, seed, std::move(tables));
}

}  // namespace vcsel

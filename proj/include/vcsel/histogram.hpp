#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "vcsel/query.hpp"
#include "vcsel/relation.hpp"

namespace vcsel {

struct McvEntry {
  Value value = 0;
  double frequency = 0.0;

  friend bool operator==(const McvEntry&, const McvEntry&) = default;
};

// Most common values, by descending frequency (ties: smaller value first).
struct McvList {
  std::vector<McvEntry> entries;
  std::size_t capacity = 0;

  double total() const {
    double t = 0.0;
    for (const auto& e : entries) t += e.frequency;
    return t;
  }
  const McvEntry* find(Value v) const {
    for (const auto& e : entries) {
      if (e.value == v) return &e;
    }
    return nullptr;
  }

  friend bool operator==(const McvList&, const McvList&) = default;
};

// B equal-frequency buckets over the non-MCV values. boundaries holds B + 1
// values (empty when nothing is left after the MCV list); each bucket
// carries non_mcv_fraction / B of the column.
struct EquiDepthHistogram {
  std::vector<Value> boundaries;
  double non_mcv_fraction = 0.0;

  std::size_t bucket_count() const {
    return boundaries.empty() ? 0 : boundaries.size() - 1;
  }
  double bucket_fraction() const {
    return bucket_count() == 0
               ? 0.0
               : non_mcv_fraction / static_cast<double>(bucket_count());
  }

  // Fraction of the histogram's own mass at or below x, interpolating
  // linearly inside the bucket that contains x.
  double cdf(Value x) const {
    if (boundaries.empty() || x < boundaries.front()) return 0.0;
    if (x >= boundaries.back()) return 1.0;
    const auto pos = static_cast<std::size_t>(
        std::upper_bound(boundaries.begin(), boundaries.end(), x) -
        boundaries.begin());
    const std::size_t k = pos - 1;
    const double lo = static_cast<double>(boundaries[k]);
    const double hi = static_cast<double>(boundaries[pos]);
    const double within = (static_cast<double>(x) - lo) / (hi - lo);
    return (static_cast<double>(k) + within) /
           static_cast<double>(bucket_count());
  }

  friend bool operator==(const EquiDepthHistogram&,
                         const EquiDepthHistogram&) = default;
};

struct ColumnStats {
  McvList mcv;
  EquiDepthHistogram histogram;
  std::size_t n_distinct = 0;
  std::size_t row_count = 0;

  friend bool operator==(const ColumnStats&, const ColumnStats&) = default;
};

inline ColumnStats build_column_stats(std::vector<Value> values,
                                      std::size_t buckets,
                                      std::size_t mcv_capacity) {
  if (values.empty()) throw ValidationError("cannot build stats on no rows");
  if (buckets < 1) throw ValidationError("need at least one bucket");
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());

  std::vector<std::pair<Value, std::size_t>> runs;
  for (Value v : values) {
    if (runs.empty() || runs.back().first != v) {
      runs.emplace_back(v, 0);
    }
    ++runs.back().second;
  }

  ColumnStats stats;
  stats.row_count = values.size();
  stats.n_distinct = runs.size();
  stats.mcv.capacity = mcv_capacity;

  auto by_frequency = runs;
  std::stable_sort(by_frequency.begin(), by_frequency.end(),
                   [](const auto& a, const auto& b) {
                     return a.second > b.second;
                   });
  by_frequency.resize(std::min(mcv_capacity, by_frequency.size()));
  std::vector<Value> mcv_values;
  for (const auto& [v, count] : by_frequency) {
    stats.mcv.entries.push_back({v, static_cast<double>(count) / n});
    mcv_values.push_back(v);
  }
  std::sort(mcv_values.begin(), mcv_values.end());

  std::vector<Value> rest;
  rest.reserve(values.size());
  for (Value v : values) {
    if (!std::binary_search(mcv_values.begin(), mcv_values.end(), v)) {
      rest.push_back(v);
    }
  }
  if (!rest.empty()) {
    stats.histogram.non_mcv_fraction = static_cast<double>(rest.size()) / n;
    const std::size_t last = rest.size() - 1;
    for (std::size_t k = 0; k <= buckets; ++k) {
      stats.histogram.boundaries.push_back(rest[k * last / buckets]);
    }
  }
  return stats;
}

// Estimated fraction of rows with value op constant, under intra-bucket
// uniformity.
inline double estimate_clause(const ColumnStats& stats, ComparisonOp op,
                              Value constant) {
  const auto& hist = stats.histogram;
  auto at_most = [&](Value x) {
    double s = 0.0;
    for (const auto& e : stats.mcv.entries) {
      if (e.value <= x) s += e.frequency;
    }
    return s + hist.non_mcv_fraction * hist.cdf(x);
  };
  auto below = [&](Value x) {
    return x == std::numeric_limits<Value>::min() ? 0.0 : at_most(x - 1);
  };
  auto equal = [&]() {
    if (const auto* e = stats.mcv.find(constant)) return e->frequency;
    if (hist.boundaries.empty() || constant < hist.boundaries.front() ||
        constant > hist.boundaries.back()) {
      return 0.0;
    }
    const std::size_t distinct_rest =
        stats.n_distinct - stats.mcv.entries.size();
    return distinct_rest == 0
               ? 0.0
               : hist.non_mcv_fraction / static_cast<double>(distinct_rest);
  };
  double est = 0.0;
  switch (op) {
    case ComparisonOp::kEq: est = equal(); break;
    case ComparisonOp::kNe: est = 1.0 - equal(); break;
    case ComparisonOp::kLe: est = at_most(constant); break;
    case ComparisonOp::kLt: est = below(constant); break;
    case ComparisonOp::kGt: est = 1.0 - at_most(constant); break;
    case ComparisonOp::kGe: est = 1.0 - below(constant); break;
  }
  return std::clamp(est, 0.0, 1.0);
}

inline double estimate_clause(const ColumnStats& stats,
                              const SelectionClause& c) {
  return estimate_clause(stats, c.op, c.constant);
}

class StatsCatalog {
 public:
  StatsCatalog() = default;
  StatsCatalog(std::size_t buckets, std::size_t mcv_capacity)
      : buckets_(buckets), mcv_capacity_(mcv_capacity) {}

  std::size_t buckets() const noexcept { return buckets_; }
  std::size_t mcv_capacity() const noexcept { return mcv_capacity_; }

  void set(const std::string& table, const std::string& column,
           ColumnStats stats) {
    stats_[{table, column}] = std::move(stats);
  }
  const ColumnStats& get(const std::string& table,
                         const std::string& column) const {
    auto it = stats_.find({table, column});
    if (it == stats_.end()) {
      throw ValidationError("no statistics for " + table + "." + column);
    }
    return it->second;
  }
  const std::map<std::pair<std::string, std::string>, ColumnStats>& entries()
      const noexcept {
    return stats_;
  }

  friend bool operator==(const StatsCatalog&, const StatsCatalog&) = default;

 private:
  std::size_t buckets_ = 100;
  std::size_t mcv_capacity_ = 100;
  std::map<std::pair<std::string, std::string>, ColumnStats> stats_;
};

// Adds MCV list and histogram for every column of the table.
inline void build_stats(StatsCatalog& catalog, const Table& table) {
  if (table.empty()) {
    throw ValidationError("cannot build stats on empty table '" +
                          table.name() + "'");
  }
  for (std::size_t c = 0; c < table.column_count(); ++c) {
    std::vector<Value> values(table.row_count());
    for (std::size_t r = 0; r < table.row_count(); ++r) {
      values[r] = table.at(r, c);
    }
    catalog.set(table.name(), table.columns()[c].name,
                build_column_stats(std::move(values), catalog.buckets(),
                                   catalog.mcv_capacity()));
  }
}

inline StatsCatalog build_stats(const Table& table, std::size_t buckets = 100,
                                std::size_t mcv_capacity = 100) {
  StatsCatalog catalog(buckets, mcv_capacity);
  build_stats(catalog, table);
  return catalog;
}

// Clause estimates combined under independence: AND multiplies, OR adds
// (clamped to 1).
inline double estimate_predicate(const StatsCatalog& catalog,
                                 const std::string& table,
                                 const BoolExpr& expr) {
  switch (expr.kind()) {
    case BoolExpr::Kind::kClause:
      return estimate_clause(catalog.get(table, expr.clause().column),
                             expr.clause());
    case BoolExpr::Kind::kAnd:
      return estimate_predicate(catalog, table, expr.lhs()) *
             estimate_predicate(catalog, table, expr.rhs());
    case BoolExpr::Kind::kOr:
      return std::min(1.0, estimate_predicate(catalog, table, expr.lhs()) +
                               estimate_predicate(catalog, table, expr.rhs()));
  }
  return 0.0;
}

inline constexpr double kInequalityJoinSelectivity = 1.0 / 3.0;

// Plan selectivity: leaf estimates times one factor per join condition.
inline double estimate_join(const StatsCatalog& catalog,
                            const QueryPlan& plan) {
  if (plan.is_leaf()) {
    return plan.predicate()
               ? estimate_predicate(catalog, plan.table(), *plan.predicate())
               : 1.0;
  }
  const auto& c = plan.condition();
  auto eq_factor = [&] {
    const auto nl = catalog.get(c.left.table, c.left.column).n_distinct;
    const auto nr = catalog.get(c.right.table, c.right.column).n_distinct;
    return 1.0 / static_cast<double>(std::max<std::size_t>({nl, nr, 1}));
  };
  double factor = kInequalityJoinSelectivity;
  if (c.op == ComparisonOp::kEq) factor = eq_factor();
  if (c.op == ComparisonOp::kNe) factor = 1.0 - eq_factor();
  const double est = estimate_join(catalog, plan.left()) *
                     estimate_join(catalog, plan.right()) * factor;
  return std::clamp(est, 0.0, 1.0);
}

// Text form: a header line, then per column a "column" line followed by its
// "mcv" and "bound" lines. Reals are written with 17 significant digits so
// load_stats restores them exactly.
inline void dump_stats(std::ostream& out, const StatsCatalog& catalog) {
  char buf[64];
  out << "stats buckets=" << catalog.buckets()
      << " mcv=" << catalog.mcv_capacity() << '\n';
  for (const auto& [key, s] : catalog.entries()) {
    std::snprintf(buf, sizeof buf, "%.17g", s.histogram.non_mcv_fraction);
    out << "column " << key.first << ' ' << key.second
        << " rows=" << s.row_count << " n_distinct=" << s.n_distinct
        << " non_mcv=" << buf << '\n';
    for (const auto& e : s.mcv.entries) {
      std::snprintf(buf, sizeof buf, "%.17g", e.frequency);
      out << "mcv " << e.value << ' ' << buf << '\n';
    }
    for (Value b : s.histogram.boundaries) out << "bound " << b << '\n';
  }
}

inline StatsCatalog load_stats(std::istream& in) {
  auto bad = [](const std::string& line) {
    return ValidationError("malformed stats line '" + line + "'");
  };
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("empty stats catalog");
  std::size_t buckets = 0, mcv = 0;
  if (std::sscanf(line.c_str(), "stats buckets=%zu mcv=%zu", &buckets, &mcv) !=
      2) {
    throw bad(line);
  }
  StatsCatalog catalog(buckets, mcv);
  std::string table, column;
  ColumnStats current;
  bool open = false;
  auto flush = [&] {
    if (open) {
      current.mcv.capacity = mcv;
      catalog.set(table, column, std::move(current));
    }
    current = ColumnStats{};
  };
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string kind;
    ss >> kind;
    if (kind == "column") {
      flush();
      std::string rows, nd, frac;
      ss >> table >> column >> rows >> nd >> frac;
      if (ss.fail() || std::sscanf(rows.c_str(), "rows=%zu",
                                   &current.row_count) != 1 ||
          std::sscanf(nd.c_str(), "n_distinct=%zu", &current.n_distinct) !=
              1 ||
          std::sscanf(frac.c_str(), "non_mcv=%lf",
                      &current.histogram.non_mcv_fraction) != 1) {
        throw bad(line);
      }
      open = true;
    } else if (kind == "mcv" && open) {
      McvEntry e;
      ss >> e.value >> e.frequency;
      if (ss.fail()) throw bad(line);
      current.mcv.entries.push_back(e);
    } else if (kind == "bound" && open) {
      Value b = 0;
      ss >> b;
      if (ss.fail()) throw bad(line);
      current.histogram.boundaries.push_back(b);
    } else {
      throw bad(line);
    }
  }
  flush();
  return catalog;
}

}  // namespace vcsel

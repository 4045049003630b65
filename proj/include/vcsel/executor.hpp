#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "vcsel/query.hpp"
#include "vcsel/relation.hpp"

namespace vcsel {

// Output of a plan: rows are tuples of source-row ordinals, one component
// per leaf table (in leaf order). Over a sample database the ordinal k of a
// component corresponds to sampleindex k + 1.
class ResultSet {
 public:
  ResultSet() = default;
  explicit ResultSet(std::vector<std::string> tables)
      : tables_(std::move(tables)) {}

  const std::vector<std::string>& tables() const noexcept { return tables_; }
  std::size_t arity() const noexcept { return tables_.size(); }
  std::size_t size() const noexcept {
    return arity() == 0 ? 0 : ordinals_.size() / arity();
  }
  bool empty() const noexcept { return ordinals_.empty(); }

  std::span<const std::uint32_t> row(std::size_t i) const {
    return {ordinals_.data() + i * arity(), arity()};
  }
  std::vector<TupleRef> tuple_refs(std::size_t i) const {
    std::vector<TupleRef> out;
    const auto r = row(i);
    for (std::size_t k = 0; k < r.size(); ++k) out.push_back({tables_[k], r[k]});
    return out;
  }
  std::size_t component(std::string_view table) const {
    for (std::size_t k = 0; k < tables_.size(); ++k) {
      if (tables_[k] == table) return k;
    }
    throw ValidationError("result has no component for '" +
                          std::string(table) + "'");
  }

  // True when all components share one ordinal (one sampleindex).
  bool aligned(std::size_t i) const {
    const auto r = row(i);
    return std::all_of(r.begin(), r.end(),
                       [&](std::uint32_t v) { return v == r[0]; });
  }

  void push(std::span<const std::uint32_t> lhs,
            std::span<const std::uint32_t> rhs) {
    ordinals_.insert(ordinals_.end(), lhs.begin(), lhs.end());
    ordinals_.insert(ordinals_.end(), rhs.begin(), rhs.end());
  }
  void push(std::uint32_t ordinal) { ordinals_.push_back(ordinal); }

 private:
  std::vector<std::string> tables_;
  std::vector<std::uint32_t> ordinals_;
};

namespace detail {

// Predicate with column names resolved to positions.
class CompiledPredicate {
 public:
  CompiledPredicate(const BoolExpr& expr, const Table& table) {
    root_ = add(expr, table);
  }

  bool operator()(std::span<const Value> row) const { return eval(root_, row); }

 private:
  struct Node {
    BoolExpr::Kind kind;
    std::size_t column = 0;
    ComparisonOp op = ComparisonOp::kEq;
    Value constant = 0;
    std::size_t lhs = 0, rhs = 0;
  };

  std::size_t add(const BoolExpr& e, const Table& table) {
    Node n{e.kind()};
    if (e.is_clause()) {
      n.column = table.column_index(e.clause().column);
      n.op = e.clause().op;
      n.constant = e.clause().constant;
    } else {
      n.lhs = add(e.lhs(), table);
      n.rhs = add(e.rhs(), table);
    }
    nodes_.push_back(n);
    return nodes_.size() - 1;
  }

  bool eval(std::size_t i, std::span<const Value> row) const {
    const Node& n = nodes_[i];
    switch (n.kind) {
      case BoolExpr::Kind::kClause: return compare(row[n.column], n.op, n.constant);
      case BoolExpr::Kind::kAnd: return eval(n.lhs, row) && eval(n.rhs, row);
      case BoolExpr::Kind::kOr: return eval(n.lhs, row) || eval(n.rhs, row);
    }
    return false;
  }

  std::vector<Node> nodes_;
  std::size_t root_ = 0;
};

inline ResultSet filter_leaf(const Catalog& db, const QueryPlan& leaf) {
  const Table& t = db.get(leaf.table());
  ResultSet out({leaf.table()});
  if (!leaf.predicate()) {
    for (std::size_t r = 0; r < t.row_count(); ++r) {
      out.push(static_cast<std::uint32_t>(r));
    }
    return out;
  }
  const CompiledPredicate pred(*leaf.predicate(), t);
  for (std::size_t r = 0; r < t.row_count(); ++r) {
    if (pred(t.row(r))) out.push(static_cast<std::uint32_t>(r));
  }
  return out;
}

// Extracts the join-column value for every row of a result.
inline std::vector<Value> join_keys(const Catalog& db, const ResultSet& rs,
                                    const ColumnRef& col) {
  const Table& t = db.get(col.table);
  const std::size_t comp = rs.component(col.table);
  const std::size_t c = t.column_index(col.column);
  std::vector<Value> keys(rs.size());
  for (std::size_t i = 0; i < rs.size(); ++i) keys[i] = t.at(rs.row(i)[comp], c);
  return keys;
}

// Materializes the join of two child results. Output is ordered
// lexicographically by (left row, right row), hence by source ordinals.
inline ResultSet join_results(const Catalog& db, const ResultSet& lhs,
                              const ResultSet& rhs, const JoinCondition& cond) {
  auto tables = lhs.tables();
  tables.insert(tables.end(), rhs.tables().begin(), rhs.tables().end());
  ResultSet out(std::move(tables));
  const auto lkeys = join_keys(db, lhs, cond.left);
  const auto rkeys = join_keys(db, rhs, cond.right);
  if (cond.op == ComparisonOp::kEq) {
    std::unordered_map<Value, std::vector<std::uint32_t>> buckets;
    for (std::size_t j = 0; j < rkeys.size(); ++j) {
      buckets[rkeys[j]].push_back(static_cast<std::uint32_t>(j));
    }
    for (std::size_t i = 0; i < lkeys.size(); ++i) {
      auto it = buckets.find(lkeys[i]);
      if (it == buckets.end()) continue;
      for (std::uint32_t j : it->second) out.push(lhs.row(i), rhs.row(j));
    }
    return out;
  }
  for (std::size_t i = 0; i < lkeys.size(); ++i) {
    for (std::size_t j = 0; j < rkeys.size(); ++j) {
      if (compare(lkeys[i], cond.op, rkeys[j])) out.push(lhs.row(i), rhs.row(j));
    }
  }
  return out;
}

// Number of pairs satisfying the condition, without materializing them.
inline std::uint64_t count_join(const Catalog& db, const ResultSet& lhs,
                                const ResultSet& rhs,
                                const JoinCondition& cond) {
  const auto lkeys = join_keys(db, lhs, cond.left);
  auto rkeys = join_keys(db, rhs, cond.right);
  std::sort(rkeys.begin(), rkeys.end());
  const std::uint64_t n = rkeys.size();
  std::uint64_t total = 0;
  for (Value k : lkeys) {
    const auto lo = static_cast<std::uint64_t>(
        std::lower_bound(rkeys.begin(), rkeys.end(), k) - rkeys.begin());
    const auto hi = static_cast<std::uint64_t>(
        std::upper_bound(rkeys.begin(), rkeys.end(), k) - rkeys.begin());
    switch (cond.op) {
      // Count right keys r with k op r.
      case ComparisonOp::kEq: total += hi - lo; break;
      case ComparisonOp::kNe: total += n - (hi - lo); break;
      case ComparisonOp::kLt: total += n - hi; break;
      case ComparisonOp::kLe: total += n - lo; break;
      case ComparisonOp::kGt: total += lo; break;
      case ComparisonOp::kGe: total += hi; break;
    }
  }
  return total;
}

// Pairs whose components all carry one common ordinal, without
// materializing the join.
inline std::uint64_t count_aligned_join(const Catalog& db, const ResultSet& lhs,
                                        const ResultSet& rhs,
                                        const JoinCondition& cond) {
  const Table& lt = db.get(cond.left.table);
  const Table& rt = db.get(cond.right.table);
  const std::size_t lcomp = lhs.component(cond.left.table);
  const std::size_t rcomp = rhs.component(cond.right.table);
  const std::size_t lcol = lt.column_index(cond.left.column);
  const std::size_t rcol = rt.column_index(cond.right.column);
  std::unordered_map<std::uint32_t, Value> right_at;
  for (std::size_t j = 0; j < rhs.size(); ++j) {
    if (rhs.aligned(j)) {
      const auto ord = rhs.row(j)[0];
      right_at.emplace(ord, rt.at(rhs.row(j)[rcomp], rcol));
    }
  }
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < lhs.size(); ++i) {
    if (!lhs.aligned(i)) continue;
    const auto ord = lhs.row(i)[0];
    auto it = right_at.find(ord);
    if (it == right_at.end()) continue;
    if (compare(lt.at(lhs.row(i)[lcomp], lcol), cond.op, it->second)) ++total;
  }
  return total;
}

inline ResultSet execute(const Catalog& db, const QueryPlan& plan) {
  if (plan.is_leaf()) return filter_leaf(db, plan);
  const ResultSet l = execute(db, plan.left());
  const ResultSet r = execute(db, plan.right());
  return join_results(db, l, r, plan.condition());
}

}  // namespace detail

// Runs the plan: leaves filter their table, joins keep every pair of child
// rows that satisfies the condition.
inline ResultSet execute_plan(const Catalog& db, const QueryPlan& plan) {
  validate(plan, db);
  return detail::execute(db, plan);
}

}  // namespace vcsel

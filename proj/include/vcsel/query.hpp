#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vcsel/relation.hpp"

namespace vcsel {

enum class ComparisonOp { kLt, kGt, kLe, kGe, kEq, kNe };

inline constexpr std::array<ComparisonOp, 6> kAllOps = {
    ComparisonOp::kLt, ComparisonOp::kGt, ComparisonOp::kLe,
    ComparisonOp::kGe, ComparisonOp::kEq, ComparisonOp::kNe};

constexpr bool compare(Value lhs, ComparisonOp op, Value rhs) noexcept {
  switch (op) {
    case ComparisonOp::kLt: return lhs < rhs;
    case ComparisonOp::kGt: return lhs > rhs;
    case ComparisonOp::kLe: return lhs <= rhs;
    case ComparisonOp::kGe: return lhs >= rhs;
    case ComparisonOp::kEq: return lhs == rhs;
    case ComparisonOp::kNe: return lhs != rhs;
  }
  return false;
}

// Operator with operands swapped: a op b  <=>  b flip(op) a.
constexpr ComparisonOp flip(ComparisonOp op) noexcept {
  switch (op) {
    case ComparisonOp::kLt: return ComparisonOp::kGt;
    case ComparisonOp::kGt: return ComparisonOp::kLt;
    case ComparisonOp::kLe: return ComparisonOp::kGe;
    case ComparisonOp::kGe: return ComparisonOp::kLe;
    default: return op;
  }
}

constexpr std::string_view symbol(ComparisonOp op) noexcept {
  switch (op) {
    case ComparisonOp::kLt: return "<";
    case ComparisonOp::kGt: return ">";
    case ComparisonOp::kLe: return "<=";
    case ComparisonOp::kGe: return ">=";
    case ComparisonOp::kEq: return "=";
    case ComparisonOp::kNe: return "<>";
  }
  return "?";
}

struct SelectionClause {
  std::string column;
  ComparisonOp op = ComparisonOp::kEq;
  Value constant = 0;

  friend bool operator==(const SelectionClause&, const SelectionClause&) =
      default;
};

// Boolean combination of selection clauses over a single table.
class BoolExpr {
 public:
  enum class Kind { kClause, kAnd, kOr };

  explicit BoolExpr(SelectionClause c)
      : kind_(Kind::kClause), clause_(std::move(c)) {}

  static BoolExpr combine(Kind kind, BoolExpr lhs, BoolExpr rhs) {
    if (kind == Kind::kClause) {
      throw ValidationError("combine() needs AND or OR");
    }
    BoolExpr e;
    e.kind_ = kind;
    e.lhs_ = std::make_shared<const BoolExpr>(std::move(lhs));
    e.rhs_ = std::make_shared<const BoolExpr>(std::move(rhs));
    return e;
  }

  Kind kind() const noexcept { return kind_; }
  bool is_clause() const noexcept { return kind_ == Kind::kClause; }
  const SelectionClause& clause() const { return clause_; }
  const BoolExpr& lhs() const { return *lhs_; }
  const BoolExpr& rhs() const { return *rhs_; }

  std::size_t clause_count() const {
    return is_clause() ? 1 : lhs_->clause_count() + rhs_->clause_count();
  }

  template <typename F>
  void for_each_clause(F&& f) const {
    if (is_clause()) {
      f(clause_);
    } else {
      lhs_->for_each_clause(f);
      rhs_->for_each_clause(f);
    }
  }

  friend bool operator==(const BoolExpr& a, const BoolExpr& b) {
    if (a.kind_ != b.kind_) return false;
    if (a.is_clause()) return a.clause_ == b.clause_;
    return *a.lhs_ == *b.lhs_ && *a.rhs_ == *b.rhs_;
  }

 private:
  BoolExpr() = default;

  Kind kind_ = Kind::kClause;
  SelectionClause clause_;
  std::shared_ptr<const BoolExpr> lhs_;
  std::shared_ptr<const BoolExpr> rhs_;
};

inline BoolExpr clause(std::string column, ComparisonOp op, Value constant) {
  return BoolExpr(SelectionClause{std::move(column), op, constant});
}
inline BoolExpr operator&&(BoolExpr lhs, BoolExpr rhs) {
  return BoolExpr::combine(BoolExpr::Kind::kAnd, std::move(lhs),
                           std::move(rhs));
}
inline BoolExpr operator||(BoolExpr lhs, BoolExpr rhs) {
  return BoolExpr::combine(BoolExpr::Kind::kOr, std::move(lhs),
                           std::move(rhs));
}

struct ColumnRef {
  std::string table;
  std::string column;

  friend bool operator==(const ColumnRef&, const ColumnRef&) = default;
};

// left op right, with left taken from the join's left subtree.
struct JoinCondition {
  ColumnRef left;
  ComparisonOp op = ComparisonOp::kEq;
  ColumnRef right;

  JoinCondition flipped() const { return {right, flip(op), left}; }
  friend bool operator==(const JoinCondition&, const JoinCondition&) =
      default;
};

// Binary plan tree: select leaves (one base table each, optional predicate,
// absent = TRUE) and join internal nodes.
class QueryPlan {
 public:
  static QueryPlan leaf(std::string table,
                        std::optional<BoolExpr> predicate = std::nullopt) {
    if (!is_identifier(table)) {
      throw ValidationError("invalid table name '" + table + "'");
    }
    auto n = std::make_shared<Node>();
    n->table = std::move(table);
    n->predicate = std::move(predicate);
    n->tables = {n->table};
    return QueryPlan(std::move(n));
  }

  // The condition may be given in either orientation; it is stored with its
  // left side referencing the left subtree.
  static QueryPlan join(QueryPlan left, QueryPlan right,
                        JoinCondition condition) {
    for (const auto& t : left.tables()) {
      if (right.contains_table(t)) {
        throw ValidationError("table '" + t +
                              "' appears more than once (self-joins are "
                              "not supported)");
      }
    }
    if (condition.left.table == condition.right.table) {
      throw ValidationError("join condition compares table '" +
                            condition.left.table + "' with itself");
    }
    if (!left.contains_table(condition.left.table)) {
      condition = condition.flipped();
    }
    if (!left.contains_table(condition.left.table) ||
        !right.contains_table(condition.right.table)) {
      throw ValidationError(
          "join condition does not connect the two subtrees");
    }
    auto n = std::make_shared<Node>();
    n->tables = left.tables();
    n->tables.insert(n->tables.end(), right.tables().begin(),
                     right.tables().end());
    n->left = std::move(left.node_);
    n->right = std::move(right.node_);
    n->condition = std::move(condition);
    return QueryPlan(std::move(n));
  }

  bool is_leaf() const noexcept { return !node_->left; }

  const std::string& table() const { return node_->table; }
  const std::optional<BoolExpr>& predicate() const { return node_->predicate; }

  QueryPlan left() const { return QueryPlan(node_->left); }
  QueryPlan right() const { return QueryPlan(node_->right); }
  const JoinCondition& condition() const { return node_->condition; }

  // Base tables in left-to-right leaf order.
  const std::vector<std::string>& tables() const noexcept {
    return node_->tables;
  }
  bool contains_table(std::string_view name) const {
    return std::find(node_->tables.begin(), node_->tables.end(), name) !=
           node_->tables.end();
  }
  std::size_t leaf_count() const noexcept { return node_->tables.size(); }

  friend bool operator==(const QueryPlan& a, const QueryPlan& b) {
    if (a.is_leaf() != b.is_leaf()) return false;
    if (a.is_leaf()) {
      return a.table() == b.table() && a.predicate() == b.predicate();
    }
    return a.condition() == b.condition() && a.left() == b.left() &&
           a.right() == b.right();
  }

 private:
  struct Node {
    std::string table;
    std::optional<BoolExpr> predicate;
    std::shared_ptr<const Node> left;
    std::shared_ptr<const Node> right;
    JoinCondition condition;
    std::vector<std::string> tables;
  };

  explicit QueryPlan(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

  std::shared_ptr<const Node> node_;
};

// Checks every table and column reference against the catalog.
inline void validate(const QueryPlan& plan, const Catalog& catalog) {
  if (plan.is_leaf()) {
    const Table& t = catalog.get(plan.table());
    if (plan.predicate()) {
      plan.predicate()->for_each_clause(
          [&](const SelectionClause& c) { t.column_index(c.column); });
    }
    return;
  }
  validate(plan.left(), catalog);
  validate(plan.right(), catalog);
  const auto& c = plan.condition();
  catalog.get(c.left.table).column_index(c.left.column);
  catalog.get(c.right.table).column_index(c.right.column);
}

inline bool eval_predicate(const BoolExpr& expr, std::span<const Value> row,
                           std::span<const ColumnMeta> schema) {
  switch (expr.kind()) {
    case BoolExpr::Kind::kClause: {
      const auto& c = expr.clause();
      for (std::size_t i = 0; i < schema.size(); ++i) {
        if (schema[i].name == c.column) {
          return compare(row[i], c.op, c.constant);
        }
      }
      throw ValidationError("unknown column '" + c.column + "'");
    }
    case BoolExpr::Kind::kAnd:
      return eval_predicate(expr.lhs(), row, schema) &&
             eval_predicate(expr.rhs(), row, schema);
    case BoolExpr::Kind::kOr:
      return eval_predicate(expr.lhs(), row, schema) ||
             eval_predicate(expr.rhs(), row, schema);
  }
  return false;
}

inline bool eval_predicate(const BoolExpr& expr, std::span<const Value> row,
                           const Table& schema) {
  return eval_predicate(expr, row, schema.columns());
}

struct ClassParams {
  std::size_t u = 0;
  std::size_t m = 0;
  std::size_t b = 0;

  friend bool operator==(const ClassParams&, const ClassParams&) = default;
};

// kSurface counts every written clause once. kEffective counts = and <> as
// two clauses, matching their rewrite into a pair of inequalities.
enum class ClauseCounting { kSurface, kEffective };

inline ClassParams class_params(const QueryPlan& plan,
                                ClauseCounting counting =
                                    ClauseCounting::kSurface) {
  if (plan.is_leaf()) {
    ClassParams p{1, 0, 0};
    if (plan.predicate()) {
      std::set<std::string> columns;
      plan.predicate()->for_each_clause([&](const SelectionClause& c) {
        columns.insert(c.column);
        const bool doubled = counting == ClauseCounting::kEffective &&
                             (c.op == ComparisonOp::kEq ||
                              c.op == ComparisonOp::kNe);
        p.b += doubled ? 2 : 1;
      });
      p.m = columns.size();
    }
    return p;
  }
  const auto l = class_params(plan.left(), counting);
  const auto r = class_params(plan.right(), counting);
  return {l.u + r.u, std::max(l.m, r.m), std::max(l.b, r.b)};
}

namespace detail {
inline void collect_post_order(const QueryPlan& plan,
                               std::vector<QueryPlan>& out) {
  if (!plan.is_leaf()) {
    collect_post_order(plan.left(), out);
    collect_post_order(plan.right(), out);
  }
  out.push_back(plan);
}
}  // namespace detail

// Every subtree, children before parents; the root is last.
inline std::vector<QueryPlan> subplans(const QueryPlan& plan) {
  std::vector<QueryPlan> out;
  detail::collect_post_order(plan, out);
  return out;
}

// Canonical SQL text. Parsing the result yields a structurally identical
// plan.
inline std::string to_sql(const BoolExpr& expr, std::string_view table) {
  using K = BoolExpr::Kind;
  if (expr.is_clause()) {
    const auto& c = expr.clause();
    return std::string(table) + "." + c.column + " " +
           std::string(symbol(c.op)) + " " + std::to_string(c.constant);
  }
  auto wrap = [&](const BoolExpr& e, bool parens) {
    auto s = to_sql(e, table);
    return parens ? "(" + s + ")" : s;
  };
  if (expr.kind() == K::kAnd) {
    return wrap(expr.lhs(), expr.lhs().kind() == K::kOr) + " AND " +
           wrap(expr.rhs(), !expr.rhs().is_clause());
  }
  return wrap(expr.lhs(), false) + " OR " +
         wrap(expr.rhs(), expr.rhs().kind() == K::kOr);
}

namespace detail {
inline void collect_sql_parts(const QueryPlan& plan,
                              std::vector<std::string>& predicates,
                              std::vector<std::string>& joins) {
  if (plan.is_leaf()) {
    if (plan.predicate()) {
      const auto& p = *plan.predicate();
      auto s = to_sql(p, plan.table());
      predicates.push_back(p.is_clause() ? s : "(" + s + ")");
    }
    return;
  }
  collect_sql_parts(plan.left(), predicates, joins);
  collect_sql_parts(plan.right(), predicates, joins);
  const auto& c = plan.condition();
  joins.push_back(c.left.table + "." + c.left.column + " " +
                  std::string(symbol(c.op)) + " " + c.right.table + "." +
                  c.right.column);
}
}  // namespace detail

inline std::string to_sql(const QueryPlan& plan) {
  std::string out = "SELECT * FROM ";
  const auto& tables = plan.tables();
  for (std::size_t i = 0; i < tables.size(); ++i) {
    if (i) out += ", ";
    out += tables[i];
  }
  std::vector<std::string> predicates, joins;
  detail::collect_sql_parts(plan, predicates, joins);
  // Join conditions first, in bottom-up order, so re-parsing rebuilds the
  // same left-deep shape.
  std::vector<std::string> parts = joins;
  parts.insert(parts.end(), predicates.begin(), predicates.end());
  for (std::size_t i = 0; i < parts.size(); ++i) {
    out += i ? " AND " : " WHERE ";
    out += parts[i];
  }
  return out;
}

}  // namespace vcsel

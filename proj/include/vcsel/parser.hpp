#pragma once

#include <cctype>
#include <charconv>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vcsel/query.hpp"

namespace vcsel {

namespace detail {

struct Token {
  enum class Kind { kIdent, kInt, kComma, kDot, kStar, kLParen, kRParen, kOp, kEnd };
  Kind kind = Kind::kEnd;
  std::string text;
  std::size_t pos = 0;
  Value value = 0;
  ComparisonOp op = ComparisonOp::kEq;
};

inline std::vector<Token> tokenize(std::string_view s) {
  using K = Token::Kind;
  std::vector<Token> out;
  std::size_t i = 0;
  auto is_ident_start = [](char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
  };
  auto is_ident_char = [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  };
  auto is_digit = [](char c) { return c >= '0' && c <= '9'; };
  while (i < s.size()) {
    const char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    Token t;
    t.pos = i;
    if (is_ident_start(c)) {
      std::size_t j = i;
      while (j < s.size() && is_ident_char(s[j])) ++j;
      t.kind = K::kIdent;
      t.text = std::string(s.substr(i, j - i));
      i = j;
    } else if (is_digit(c) ||
               (c == '-' && i + 1 < s.size() && is_digit(s[i + 1]))) {
      std::size_t j = i + 1;
      while (j < s.size() && is_digit(s[j])) ++j;
      t.kind = K::kInt;
      t.text = std::string(s.substr(i, j - i));
      auto [ptr, ec] = std::from_chars(s.data() + i, s.data() + j, t.value);
      if (ec != std::errc() || ptr != s.data() + j) {
        throw ParseError("integer literal out of range", i);
      }
      i = j;
    } else if (c == ',') {
      t.kind = K::kComma, ++i;
    } else if (c == '.') {
      t.kind = K::kDot, ++i;
    } else if (c == '*') {
      t.kind = K::kStar, ++i;
    } else if (c == '(') {
      t.kind = K::kLParen, ++i;
    } else if (c == ')') {
      t.kind = K::kRParen, ++i;
    } else if (c == '<' || c == '>' || c == '=') {
      t.kind = K::kOp;
      const char n = i + 1 < s.size() ? s[i + 1] : '\0';
      if (c == '<' && n == '>') {
        t.op = ComparisonOp::kNe, i += 2;
      } else if (c == '<' && n == '=') {
        t.op = ComparisonOp::kLe, i += 2;
      } else if (c == '>' && n == '=') {
        t.op = ComparisonOp::kGe, i += 2;
      } else if (c == '<') {
        t.op = ComparisonOp::kLt, ++i;
      } else if (c == '>') {
        t.op = ComparisonOp::kGt, ++i;
      } else {
        t.op = ComparisonOp::kEq, ++i;
      }
      t.text = std::string(symbol(t.op));
    } else {
      throw ParseError(std::string("unexpected character '") + c + "'", i);
    }
    out.push_back(std::move(t));
  }
  Token end;
  end.pos = s.size();
  out.push_back(end);
  return out;
}

inline bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::toupper(static_cast<unsigned char>(a[i])) !=
        std::toupper(static_cast<unsigned char>(b[i]))) {
      return false;
    }
  }
  return true;
}

// Syntax tree before plan construction. AND/OR chains are n-ary; grouped
// marks a node written inside parentheses.
struct RawExpr {
  enum class Kind { kConst, kColumns, kAnd, kOr };
  Kind kind = Kind::kConst;
  ColumnRef lhs;
  ComparisonOp op = ComparisonOp::kEq;
  Value constant = 0;
  ColumnRef rhs;  // kColumns only
  std::vector<RawExpr> children;
  bool grouped = false;
  std::size_t pos = 0;
};

class Parser {
 public:
  Parser(std::string_view text, const Catalog& catalog,
         std::vector<std::string>* warnings)
      : tokens_(tokenize(text)), catalog_(catalog), warnings_(warnings) {}

  QueryPlan parse() {
    expect_keyword("SELECT");
    expect(Token::Kind::kStar, "'*'");
    expect_keyword("FROM");
    std::vector<std::pair<std::string, std::size_t>> from;
    do {
      const Token& t = expect(Token::Kind::kIdent, "table name");
      if (is_keyword(t)) throw ParseError("expected table name", t.pos);
      if (!catalog_.find(t.text)) {
        throw ParseError("unknown table '" + t.text + "'", t.pos);
      }
      for (const auto& [name, _] : from) {
        if (name == t.text) {
          throw ParseError("table '" + t.text +
                               "' listed twice (self-joins are not supported)",
                           t.pos);
        }
      }
      from.emplace_back(t.text, t.pos);
    } while (accept(Token::Kind::kComma));
    from_ = from;

    std::vector<RawExpr> conjuncts;
    if (accept_keyword("WHERE")) {
      RawExpr where = parse_expr();
      if (where.kind == RawExpr::Kind::kAnd && !where.grouped) {
        conjuncts = std::move(where.children);
      } else {
        conjuncts.push_back(std::move(where));
      }
    }
    if (peek().kind != Token::Kind::kEnd) {
      throw ParseError("unexpected '" + peek().text + "'", peek().pos);
    }
    return build_plan(conjuncts);
  }

 private:
  const Token& peek() const { return tokens_[idx_]; }
  const Token& next() { return tokens_[idx_++]; }

  bool is_keyword(const Token& t) const {
    for (auto kw : {"SELECT", "FROM", "WHERE", "AND", "OR"}) {
      if (iequals(t.text, kw)) return true;
    }
    return false;
  }
  bool accept(Token::Kind k) {
    if (peek().kind != k) return false;
    ++idx_;
    return true;
  }
  const Token& expect(Token::Kind k, std::string_view what) {
    if (peek().kind != k) {
      throw ParseError("expected " + std::string(what), peek().pos);
    }
    return next();
  }
  bool accept_keyword(std::string_view kw) {
    if (peek().kind == Token::Kind::kIdent && iequals(peek().text, kw)) {
      ++idx_;
      return true;
    }
    return false;
  }
  void expect_keyword(std::string_view kw) {
    if (!accept_keyword(kw)) {
      throw ParseError("expected " + std::string(kw), peek().pos);
    }
  }

  RawExpr parse_expr() {
    const std::size_t pos = peek().pos;
    std::vector<RawExpr> terms;
    terms.push_back(parse_term());
    while (accept_keyword("OR")) terms.push_back(parse_term());
    if (terms.size() == 1) return std::move(terms.front());
    RawExpr e;
    e.kind = RawExpr::Kind::kOr;
    e.children = std::move(terms);
    e.pos = pos;
    return e;
  }

  RawExpr parse_term() {
    const std::size_t pos = peek().pos;
    std::vector<RawExpr> factors;
    factors.push_back(parse_factor());
    while (accept_keyword("AND")) factors.push_back(parse_factor());
    if (factors.size() == 1) return std::move(factors.front());
    RawExpr e;
    e.kind = RawExpr::Kind::kAnd;
    e.children = std::move(factors);
    e.pos = pos;
    return e;
  }

  RawExpr parse_factor() {
    if (accept(Token::Kind::kLParen)) {
      RawExpr e = parse_expr();
      expect(Token::Kind::kRParen, "')'");
      e.grouped = true;
      return e;
    }
    return parse_clause();
  }

  ColumnRef parse_qualcol() {
    const Token& t = expect(Token::Kind::kIdent, "qualified column");
    if (is_keyword(t)) throw ParseError("expected qualified column", t.pos);
    expect(Token::Kind::kDot, "'.' after table name");
    const Token& c = expect(Token::Kind::kIdent, "column name");
    bool listed = false;
    for (const auto& [name, _] : from_) listed = listed || name == t.text;
    if (!listed) {
      throw ParseError("table '" + t.text + "' is not in FROM", t.pos);
    }
    if (!catalog_.get(t.text).find_column(c.text)) {
      throw ParseError("unknown column '" + t.text + "." + c.text + "'",
                       c.pos);
    }
    return {t.text, c.text};
  }

  RawExpr parse_clause() {
    RawExpr e;
    e.pos = peek().pos;
    e.lhs = parse_qualcol();
    e.op = expect(Token::Kind::kOp, "comparison operator").op;
    if (peek().kind == Token::Kind::kInt) {
      e.kind = RawExpr::Kind::kConst;
      e.constant = next().value;
      const auto& t = catalog_.get(e.lhs.table);
      const auto& dom = t.columns()[t.column_index(e.lhs.column)].domain;
      if (!dom.contains(e.constant) && warnings_) {
        warnings_->push_back("constant " + std::to_string(e.constant) +
                             " lies outside the domain of " + e.lhs.table +
                             "." + e.lhs.column);
      }
    } else {
      const std::size_t rpos = peek().pos;
      e.kind = RawExpr::Kind::kColumns;
      e.rhs = parse_qualcol();
      if (e.rhs.table == e.lhs.table) {
        throw ParseError(
            "comparing two columns of the same table is not supported", rpos);
      }
    }
    return e;
  }

  // Collects referenced tables; rejects column-column clauses nested inside
  // a predicate.
  void tables_of(const RawExpr& e, std::vector<std::string>& out) const {
    if (e.kind == RawExpr::Kind::kColumns) {
      throw ParseError(
          "join conditions must be top-level AND terms of the WHERE clause",
          e.pos);
    }
    if (e.kind == RawExpr::Kind::kConst) {
      if (std::find(out.begin(), out.end(), e.lhs.table) == out.end()) {
        out.push_back(e.lhs.table);
      }
      return;
    }
    for (const auto& c : e.children) tables_of(c, out);
  }

  static BoolExpr to_bool(const RawExpr& e) {
    if (e.kind == RawExpr::Kind::kConst) {
      return clause(e.lhs.column, e.op, e.constant);
    }
    BoolExpr acc = to_bool(e.children.front());
    for (std::size_t i = 1; i < e.children.size(); ++i) {
      acc = e.kind == RawExpr::Kind::kAnd ? acc && to_bool(e.children[i])
                                          : acc || to_bool(e.children[i]);
    }
    return acc;
  }

  QueryPlan build_plan(const std::vector<RawExpr>& conjuncts) {
    std::map<std::string, std::optional<BoolExpr>> predicates;
    std::vector<const RawExpr*> joins;
    for (const auto& c : conjuncts) {
      if (c.kind == RawExpr::Kind::kColumns) {
        joins.push_back(&c);
        continue;
      }
      std::vector<std::string> tables;
      tables_of(c, tables);
      if (tables.size() != 1) {
        throw ParseError(
            "predicate mixes tables and cannot be pushed to a single table",
            c.pos);
      }
      auto& slot = predicates[tables.front()];
      slot = slot ? *slot && to_bool(c) : to_bool(c);
    }
    auto leaf = [&](const std::string& t) {
      auto it = predicates.find(t);
      return QueryPlan::leaf(
          t, it == predicates.end() ? std::nullopt : it->second);
    };

    if (joins.empty()) {
      if (from_.size() > 1) {
        throw ParseError("table '" + from_[1].first +
                             "' is not connected by a join condition",
                         from_[1].second);
      }
      return leaf(from_.front().first);
    }
    if (joins.size() != from_.size() - 1) {
      throw ParseError(
          "expected exactly " + std::to_string(from_.size() - 1) +
              " join condition(s) for " + std::to_string(from_.size()) +
              " tables",
          joins.back()->pos);
    }

    // Left-deep tree in WHERE order; a condition that does not yet touch
    // the tree is retried after later ones have been placed.
    std::optional<QueryPlan> tree;
    std::vector<const RawExpr*> pending = joins;
    while (!pending.empty()) {
      bool progressed = false;
      for (auto it = pending.begin(); it != pending.end(); ++it) {
        const RawExpr& j = **it;
        JoinCondition cond{j.lhs, j.op, j.rhs};
        if (!tree) {
          tree = QueryPlan::join(leaf(cond.left.table),
                                 leaf(cond.right.table), cond);
        } else {
          const bool l_in = tree->contains_table(cond.left.table);
          const bool r_in = tree->contains_table(cond.right.table);
          if (l_in && r_in) {
            throw ParseError(
                "join condition closes a cycle; only tree-shaped joins are "
                "supported",
                j.pos);
          }
          if (!l_in && !r_in) continue;
          const std::string& fresh =
              l_in ? cond.right.table : cond.left.table;
          tree = QueryPlan::join(*tree, leaf(fresh), cond);
        }
        pending.erase(it);
        progressed = true;
        break;
      }
      if (!progressed) {
        throw ParseError("join conditions do not form a connected tree",
                         pending.front()->pos);
      }
    }
    for (const auto& [name, pos] : from_) {
      if (!tree->contains_table(name)) {
        throw ParseError(
            "table '" + name + "' is not connected by a join condition", pos);
      }
    }
    return *tree;
  }

  std::vector<Token> tokens_;
  std::size_t idx_ = 0;
  const Catalog& catalog_;
  std::vector<std::string>* warnings_;
  std::vector<std::pair<std::string, std::size_t>> from_;
};

}  // namespace detail

// Parses the SELECT * FROM ... WHERE ... subset into a plan with all
// selections pushed to the leaves. Constants outside a column's domain are
// reported through warnings (when given) rather than rejected.
inline QueryPlan parse_query(std::string_view text, const Catalog& catalog,
                             std::vector<std::string>* warnings = nullptr) {
  return detail::Parser(text, catalog, warnings).parse();
}

}  // namespace vcsel

#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "vcsel/executor.hpp"
#include "vcsel/sampler.hpp"

namespace vcsel {

struct NodeCounts {
  std::uint64_t total = 0;    // all result rows
  std::uint64_t aligned = 0;  // rows whose components share a sampleindex
};

namespace detail {

// Evaluates every node bottom-up, reusing each child's result for its
// parent. Only the root is counted without being materialized.
inline std::optional<ResultSet> evaluate_node(const Catalog& db,
                                              const QueryPlan& plan,
                                              bool is_root,
                                              std::vector<NodeCounts>& out) {
  if (plan.is_leaf()) {
    ResultSet rs = filter_leaf(db, plan);
    out.push_back({rs.size(), rs.size()});
    return rs;
  }
  auto l = evaluate_node(db, plan.left(), false, out);
  auto r = evaluate_node(db, plan.right(), false, out);
  const auto& cond = plan.condition();
  if (is_root) {
    out.push_back({count_join(db, *l, *r, cond),
                   count_aligned_join(db, *l, *r, cond)});
    return std::nullopt;
  }
  ResultSet rs = join_results(db, *l, *r, cond);
  std::uint64_t aligned = 0;
  for (std::size_t i = 0; i < rs.size(); ++i) aligned += rs.aligned(i) ? 1 : 0;
  out.push_back({rs.size(), aligned});
  return rs;
}

}  // namespace detail

// Per-node counts in subplans() order (post-order, root last).
inline std::vector<NodeCounts> evaluate_all_nodes(const Catalog& db,
                                                  const QueryPlan& plan) {
  validate(plan, db);
  std::vector<NodeCounts> out;
  detail::evaluate_node(db, plan, true, out);
  return out;
}

inline double cartesian_size(const Catalog& db, const QueryPlan& plan) {
  double n = 1.0;
  for (const auto& t : plan.tables()) {
    n *= static_cast<double>(db.get(t).row_count());
  }
  return n;
}

inline std::uint64_t exact_cardinality(const Catalog& db,
                                       const QueryPlan& plan) {
  return evaluate_all_nodes(db, plan).back().total;
}

// Output cardinality divided by the product of the input table sizes.
inline double exact_selectivity(const Catalog& db, const QueryPlan& plan) {
  for (const auto& t : plan.tables()) {
    if (db.get(t).empty()) {
      throw ValidationError("selectivity undefined: table '" + t +
                            "' is empty");
    }
  }
  return static_cast<double>(exact_cardinality(db, plan)) /
         cartesian_size(db, plan);
}

// Result rows whose components all carry the same sampleindex.
inline std::uint64_t count_aligned(const SampleDatabase& sample,
                                   const QueryPlan& plan) {
  return evaluate_all_nodes(sample.catalog(), plan).back().aligned;
}

// Index-aligned estimate: aligned result rows over s.
inline double estimate_indexed(const SampleDatabase& sample,
                               const QueryPlan& plan) {
  return static_cast<double>(count_aligned(sample, plan)) /
         static_cast<double>(sample.size());
}

// Ignores sampleindex: all result rows over s^l for l leaf tables.
inline double estimate_practitioner(const SampleDatabase& sample,
                                    const QueryPlan& plan) {
  const auto total = evaluate_all_nodes(sample.catalog(), plan).back().total;
  return static_cast<double>(total) /
         std::pow(static_cast<double>(sample.size()),
                  static_cast<double>(plan.leaf_count()));
}

struct EstimateRecord {
  std::size_t node_id = 0;  // position in subplans() order
  std::string node_kind;    // "select" or "join"
  std::optional<double> exact;
  std::optional<std::uint64_t> cardinality_exact;
  double est_indexed = 0.0;
  double est_practitioner = 0.0;
  std::size_t s = 0;
};

// One record per subplan. With db given, exact selectivities are filled in.
inline std::vector<EstimateRecord> estimate_all_nodes(
    const SampleDatabase& sample, const QueryPlan& plan,
    const Catalog* db = nullptr) {
  const auto nodes = subplans(plan);
  const auto est = evaluate_all_nodes(sample.catalog(), plan);
  std::vector<NodeCounts> exact;
  if (db) exact = evaluate_all_nodes(*db, plan);
  const double s = static_cast<double>(sample.size());
  std::vector<EstimateRecord> out;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    EstimateRecord rec;
    rec.node_id = i;
    rec.node_kind = nodes[i].is_leaf() ? "select" : "join";
    rec.s = sample.size();
    rec.est_indexed = static_cast<double>(est[i].aligned) / s;
    rec.est_practitioner =
        static_cast<double>(est[i].total) /
        std::pow(s, static_cast<double>(nodes[i].leaf_count()));
    if (db) {
      rec.cardinality_exact = exact[i].total;
      rec.exact = static_cast<double>(exact[i].total) /
                  cartesian_size(*db, nodes[i]);
    }
    out.push_back(std::move(rec));
  }
  return out;
}

// Fixed formatting for reals in every CSV the library emits.
inline std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline void write_estimates_header(std::ostream& out) {
  out << "query_id,node_id,node_kind,exact,est_indexed,est_practitioner,s,"
         "seed\n";
}

inline void write_estimates(std::ostream& out, std::size_t query_id,
                            const std::vector<EstimateRecord>& records,
                            std::uint64_t seed) {
  for (const auto& r : records) {
    out << query_id << ',' << r.node_id << ',' << r.node_kind << ','
        << (r.exact ? format_real(*r.exact) : std::string()) << ','
        << format_real(r.est_indexed) << ',' << format_real(r.est_practitioner)
        << ',' << r.s << ',' << seed << '\n';
  }
}

}  // namespace vcsel

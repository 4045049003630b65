#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "vcsel/estimator.hpp"
#include "vcsel/histogram.hpp"
#include "vcsel/query.hpp"
#include "vcsel/sampler.hpp"

namespace vcsel {

enum class WorkloadKind { kSelect, kJoinPair };

struct WorkloadSpec {
  std::size_t m = 1;
  std::size_t b = 1;
  std::size_t count = 100;
  WorkloadKind kind = WorkloadKind::kSelect;
  std::uint64_t seed = 0;
  // Predicates go on tables[0]; join-pair workloads join it with tables[1]
  // on join_column (present in both).
  std::vector<std::string> tables;
  std::string join_column;
};

// Random plans: m distinct columns per predicate, b clauses assigned to the
// chosen columns round-robin, operators and constants uniform, b-1 AND/OR
// connectors uniform and left-associative.
inline std::vector<QueryPlan> generate_workload(const WorkloadSpec& spec,
                                                const Catalog& catalog) {
  if (spec.count < 1) throw ValidationError("workload count must be >= 1");
  if (spec.m < 1) throw ValidationError("workload m must be >= 1");
  if (spec.b < spec.m) {
    throw ValidationError("workload needs b >= m so every column is used");
  }
  const std::size_t needed = spec.kind == WorkloadKind::kSelect ? 1 : 2;
  if (spec.tables.size() < needed) {
    throw ValidationError("workload needs " + std::to_string(needed) +
                          " table name(s)");
  }
  const Table& target = catalog.get(spec.tables[0]);
  if (target.column_count() < spec.m) {
    throw ValidationError("table '" + target.name() + "' has fewer than m = " +
                          std::to_string(spec.m) + " columns");
  }
  std::optional<JoinCondition> join;
  if (spec.kind == WorkloadKind::kJoinPair) {
    const Table& partner = catalog.get(spec.tables[1]);
    if (!target.find_column(spec.join_column) ||
        !partner.find_column(spec.join_column)) {
      throw ValidationError("join column '" + spec.join_column +
                            "' missing from one of the tables");
    }
    join = JoinCondition{{target.name(), spec.join_column},
                         ComparisonOp::kEq,
                         {partner.name(), spec.join_column}};
  }

  std::mt19937_64 rng(spec.seed);
  auto uniform_index = [&](std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
  };
  std::vector<QueryPlan> plans;
  plans.reserve(spec.count);
  for (std::size_t q = 0; q < spec.count; ++q) {
    std::vector<std::size_t> columns(target.column_count());
    for (std::size_t i = 0; i < columns.size(); ++i) columns[i] = i;
    for (std::size_t i = 0; i < spec.m; ++i) {
      std::swap(columns[i], columns[i + uniform_index(columns.size() - i)]);
    }
    columns.resize(spec.m);

    std::optional<BoolExpr> pred;
    for (std::size_t k = 0; k < spec.b; ++k) {
      const auto& meta = target.columns()[columns[k % spec.m]];
      const ComparisonOp op = kAllOps[uniform_index(kAllOps.size())];
      const Value constant = std::uniform_int_distribution<Value>(
          meta.domain.lo, meta.domain.hi)(rng);
      BoolExpr c = clause(meta.name, op, constant);
      if (!pred) {
        pred = std::move(c);
      } else {
        pred = uniform_index(2) == 0 ? std::move(*pred) && std::move(c)
                                     : std::move(*pred) || std::move(c);
      }
    }
    auto leaf = QueryPlan::leaf(target.name(), std::move(pred));
    if (join) {
      plans.push_back(
          QueryPlan::join(std::move(leaf), QueryPlan::leaf(spec.tables[1]),
                          *join));
    } else {
      plans.push_back(std::move(leaf));
    }
  }
  return plans;
}

struct PercentError {
  bool excluded = false;  // exact == 0 while predicted > 0
  double percent = 0.0;   // valid unless excluded
  double absolute = 0.0;
};

// 100 |predicted - exact| / exact. A zero exact selectivity yields 0 when
// the prediction is also 0, otherwise the query is excluded and only the
// absolute error is kept.
inline PercentError percent_error(double predicted, double exact) {
  if (predicted < 0.0 || exact < 0.0) {
    throw ValidationError("selectivities must be non-negative");
  }
  PercentError e;
  e.absolute = std::abs(predicted - exact);
  if (exact > 0.0) {
    e.percent = 100.0 * e.absolute / exact;
  } else if (predicted > 0.0) {
    e.excluded = true;
  }
  return e;
}

enum class Method { kIndexed, kPractitioner, kHistogram };

inline std::string_view method_name(Method m) {
  switch (m) {
    case Method::kIndexed: return "indexed";
    case Method::kPractitioner: return "practitioner";
    case Method::kHistogram: return "histogram";
  }
  return "?";
}

inline Method parse_method(std::string_view s) {
  for (Method m : {Method::kIndexed, Method::kPractitioner, Method::kHistogram}) {
    if (method_name(m) == s) return m;
  }
  throw ValidationError("unknown method '" + std::string(s) + "'");
}

struct ErrorSummary {
  Method method = Method::kIndexed;
  std::optional<std::size_t> sample_size;  // none for the histogram
  double mean_pct_error = 0.0;
  double stddev_pct_error = 0.0;
  double frac_within_eps = 0.0;
  std::size_t excluded_zero_exact = 0;
  std::size_t aggregated = 0;  // queries contributing a percent error
  double excluded_abs_error_sum = 0.0;
};

// Aggregates root-level predictions against exact selectivities.
inline ErrorSummary summarize(Method method,
                              std::optional<std::size_t> sample_size,
                              const std::vector<double>& predicted,
                              const std::vector<double>& exact,
                              double epsilon) {
  ErrorSummary s;
  s.method = method;
  s.sample_size = sample_size;
  std::vector<double> pct;
  std::size_t within = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const auto e = percent_error(predicted[i], exact[i]);
    if (e.absolute <= epsilon) ++within;
    if (e.excluded) {
      ++s.excluded_zero_exact;
      s.excluded_abs_error_sum += e.absolute;
    } else {
      pct.push_back(e.percent);
    }
  }
  s.aggregated = pct.size();
  if (!pct.empty()) {
    double sum = 0.0;
    for (double p : pct) sum += p;
    s.mean_pct_error = sum / static_cast<double>(pct.size());
    double sq = 0.0;
    for (double p : pct) sq += (p - s.mean_pct_error) * (p - s.mean_pct_error);
    s.stddev_pct_error = std::sqrt(sq / static_cast<double>(pct.size()));
  }
  s.frac_within_eps = predicted.empty()
                          ? 0.0
                          : static_cast<double>(within) /
                                static_cast<double>(predicted.size());
  return s;
}

struct ExperimentConfig {
  std::vector<std::size_t> sample_sizes;
  double epsilon = 0.05;
  std::vector<Method> methods = {Method::kIndexed, Method::kPractitioner,
                                 Method::kHistogram};
  std::uint64_t seed = 0;
  std::size_t buckets = 100;
  std::size_t mcv = 100;
  // Base tables to sample; every plan's tables must be among them.
  std::vector<std::string> tables;
};

struct SampleRun {
  std::size_t sample_size = 0;
  // Per query, one record per subplan (exact fields filled in).
  std::vector<std::vector<EstimateRecord>> records;
};

struct ExperimentResult {
  std::vector<ErrorSummary> summaries;
  std::vector<SampleRun> runs;
  // Per query, per subplan.
  std::vector<std::vector<double>> exact;
  std::vector<std::vector<double>> histogram;
  std::uint64_t seed = 0;
};

inline bool has_method(const ExperimentConfig& c, Method m) {
  return std::find(c.methods.begin(), c.methods.end(), m) != c.methods.end();
}

// Evaluates every plan exactly once on the full tables, then per sample
// size builds one sample and estimates every node of every plan. Summaries
// are taken over plan roots.
inline ExperimentResult run_experiment(const Catalog& db,
                                       const std::vector<QueryPlan>& workload,
                                       const ExperimentConfig& config) {
  if (config.methods.empty()) throw ValidationError("no methods selected");
  if (!(config.epsilon > 0.0 && config.epsilon < 1.0)) {
    throw ValidationError("epsilon must lie in (0, 1)");
  }
  ExperimentResult result;
  result.seed = config.seed;

  std::vector<double> exact_root;
  for (const auto& plan : workload) {
    for (const auto& t : plan.tables()) {
      if (std::find(config.tables.begin(), config.tables.end(), t) ==
          config.tables.end()) {
        throw ValidationError("plan uses table '" + t +
                              "' which is not part of the experiment");
      }
    }
    const auto counts = evaluate_all_nodes(db, plan);
    const auto nodes = subplans(plan);
    std::vector<double> sel;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      sel.push_back(static_cast<double>(counts[i].total) /
                    cartesian_size(db, nodes[i]));
    }
    exact_root.push_back(sel.back());
    result.exact.push_back(std::move(sel));
  }

  const bool indexed = has_method(config, Method::kIndexed);
  const bool practitioner = has_method(config, Method::kPractitioner);
  if (indexed || practitioner) {
    if (config.sample_sizes.empty()) {
      throw ValidationError("sampling methods need at least one sample size");
    }
    for (std::size_t s : config.sample_sizes) {
      const auto sample = create_sample(s, db, config.tables, config.seed);
      SampleRun run;
      run.sample_size = s;
      std::vector<double> idx_root, prac_root;
      for (std::size_t q = 0; q < workload.size(); ++q) {
        auto records = estimate_all_nodes(sample, workload[q]);
        for (std::size_t i = 0; i < records.size(); ++i) {
          records[i].exact = result.exact[q][i];
        }
        idx_root.push_back(records.back().est_indexed);
        prac_root.push_back(records.back().est_practitioner);
        run.records.push_back(std::move(records));
      }
      if (indexed) {
        result.summaries.push_back(summarize(Method::kIndexed, s, idx_root,
                                             exact_root, config.epsilon));
      }
      if (practitioner) {
        result.summaries.push_back(summarize(Method::kPractitioner, s,
                                             prac_root, exact_root,
                                             config.epsilon));
      }
      result.runs.push_back(std::move(run));
    }
  }

  if (has_method(config, Method::kHistogram)) {
    StatsCatalog stats(config.buckets, config.mcv);
    for (const auto& t : config.tables) build_stats(stats, db.get(t));
    std::vector<double> hist_root;
    for (const auto& plan : workload) {
      std::vector<double> per_node;
      for (const auto& node : subplans(plan)) {
        per_node.push_back(estimate_join(stats, node));
      }
      hist_root.push_back(per_node.back());
      result.histogram.push_back(std::move(per_node));
    }
    result.summaries.push_back(summarize(Method::kHistogram, std::nullopt,
                                         hist_root, exact_root,
                                         config.epsilon));
  }
  return result;
}

inline void write_summary_csv(std::ostream& out,
                              const std::vector<ErrorSummary>& summaries) {
  out << "method,sample_size,mean_pct_error,stddev_pct_error,frac_within_eps,"
         "excluded\n";
  for (const auto& s : summaries) {
    out << method_name(s.method) << ','
        << (s.sample_size ? std::to_string(*s.sample_size) : std::string())
        << ',' << format_real(s.mean_pct_error) << ','
        << format_real(s.stddev_pct_error) << ','
        << format_real(s.frac_within_eps) << ',' << s.excluded_zero_exact
        << '\n';
  }
}

inline void write_per_query_csv(std::ostream& out,
                                const ExperimentResult& result) {
  write_estimates_header(out);
  for (const auto& run : result.runs) {
    for (std::size_t q = 0; q < run.records.size(); ++q) {
      write_estimates(out, q, run.records[q], result.seed);
    }
  }
}

inline void write_histogram_csv(std::ostream& out,
                                const ExperimentResult& result,
                                const std::vector<QueryPlan>& workload) {
  out << "query_id,node_id,node_kind,exact,est_histogram\n";
  for (std::size_t q = 0; q < result.histogram.size(); ++q) {
    const auto nodes = subplans(workload[q]);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      out << q << ',' << i << ',' << (nodes[i].is_leaf() ? "select" : "join")
          << ',' << format_real(result.exact[q][i]) << ','
          << format_real(result.histogram[q][i]) << '\n';
    }
  }
}

}  // namespace vcsel

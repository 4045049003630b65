#include <cmath>
#include <random>

#include "gtest/gtest.h"

#include "property_checks.hpp"
#include "test_util.hpp"
#include "vcsel/workload.hpp"

namespace vcsel {
namespace {

using Op = ComparisonOp;

std::shared_ptr<const Table> column_table(const std::string& name,
                                          std::vector<Value> values) {
  return std::make_shared<const Table>(
      Table(name, {{"C", {0, 10}}}, std::move(values)));
}

Catalog catalog_of(std::initializer_list<std::shared_ptr<const Table>> ts) {
  Catalog c;
  for (const auto& t : ts) c.add(t);
  return c;
}

// Sample tables given directly: row k carries sampleindex k + 1.
SampleDatabase sample_of(std::size_t s,
                         std::initializer_list<std::shared_ptr<const Table>> ts) {
  std::vector<SampleTable> tables;
  for (const auto& t : ts) tables.emplace_back(t);
  return SampleDatabase(s, 0, std::move(tables));
}

const JoinCondition kAeqB{{"A", "C"}, Op::kEq, {"B", "C"}};

TEST(ExecutePlan, TrueLeafReturnsEveryRow) {
  const auto db = catalog_of({column_table("A", {1, 2, 3, 4})});
  const auto rs = execute_plan(db, QueryPlan::leaf("A"));
  EXPECT_EQ(rs.size(), 4u);
  EXPECT_EQ(rs.arity(), 1u);
}

TEST(ExecutePlan, EqualityJoinPairs) {
  const auto db = catalog_of({column_table("A", {1, 2}), column_table("B", {2, 2})});
  const auto rs = execute_plan(
      db, QueryPlan::join(QueryPlan::leaf("A"), QueryPlan::leaf("B"), kAeqB));
  EXPECT_EQ(testing::rows_of(rs),
            (std::vector<testing::OrdinalTuple>{{1, 0}, {1, 1}}));
  const auto refs = rs.tuple_refs(0);
  EXPECT_EQ(refs[0].table, "A");
  EXPECT_EQ(refs[1].ordinal, 0u);
}

TEST(ExecutePlan, ThreeTableChainMatchesBruteForce) {
  const auto db = catalog_of({column_table("A", {1, 2, 3}),
                              column_table("B", {2, 3, 3}),
                              column_table("D", {0, 3, 5})});
  for (Op op1 : kAllOps) {
    for (Op op2 : kAllOps) {
      const auto plan = QueryPlan::join(
          QueryPlan::join(QueryPlan::leaf("A", clause("C", Op::kGe, 2)),
                          QueryPlan::leaf("B"), {{"A", "C"}, op1, {"B", "C"}}),
          QueryPlan::leaf("D"), {{"B", "C"}, op2, {"D", "C"}});
      EXPECT_EQ(testing::rows_of(execute_plan(db, plan)),
                testing::brute_force(db, plan));
    }
  }
}

TEST(ExecutePlan, UnknownTable) {
  const auto db = catalog_of({column_table("A", {1})});
  EXPECT_THROW(execute_plan(db, QueryPlan::leaf("Z")), ValidationError);
}

TEST(ExactSelectivity, Examples) {
  const auto t = std::make_shared<const Table>(
      generate_uniform_table("T", 50, 2, {0, 10}, 3));
  const auto db = catalog_of({t});
  EXPECT_DOUBLE_EQ(exact_selectivity(db, QueryPlan::leaf("T")), 1.0);
  EXPECT_DOUBLE_EQ(
      exact_selectivity(db, QueryPlan::leaf("T", clause("C1", Op::kGe, 5) &&
                                                     clause("C1", Op::kLe, 1))),
      0.0);
  const auto ab = catalog_of({column_table("A", {1, 2, 3}), column_table("B", {3, 4, 5})});
  EXPECT_DOUBLE_EQ(
      exact_selectivity(ab, QueryPlan::join(QueryPlan::leaf("A"),
                                            QueryPlan::leaf("B"), kAeqB)),
      1.0 / 9.0);
  EXPECT_EQ(exact_cardinality(ab, QueryPlan::join(QueryPlan::leaf("A"),
                                                  QueryPlan::leaf("B"), kAeqB)),
            1u);
}

TEST(ExactSelectivity, EmptyInputIsAnError) {
  const auto db = catalog_of({column_table("A", {})});
  EXPECT_THROW(exact_selectivity(db, QueryPlan::leaf("A")), ValidationError);
}

TEST(Estimators, AlignedAndPractitionerCounts) {
  const auto sample = sample_of(3, {column_table("A", {1, 2, 3}),
                                    column_table("B", {1, 5, 3})});
  const auto plan =
      QueryPlan::join(QueryPlan::leaf("A"), QueryPlan::leaf("B"), kAeqB);
  EXPECT_DOUBLE_EQ(estimate_indexed(sample, plan), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(estimate_practitioner(sample, plan), 2.0 / 9.0);
  EXPECT_EQ(testing::brute_force_aligned(sample, plan), 2u);
}

TEST(Estimators, SingleTableEstimatorsAgree) {
  const auto sample = sample_of(4, {column_table("A", {1, 2, 3, 9})});
  const auto all = QueryPlan::leaf("A");
  EXPECT_DOUBLE_EQ(estimate_indexed(sample, all), 1.0);
  const auto some = QueryPlan::leaf("A", clause("C", Op::kGt, 2));
  EXPECT_DOUBLE_EQ(estimate_indexed(sample, some), 0.5);
  EXPECT_DOUBLE_EQ(estimate_practitioner(sample, some), 0.5);
}

TEST(Estimators, UnalignedMatchesAreIgnored) {
  const auto sample = sample_of(3, {column_table("A", {1, 2, 3}),
                                    column_table("B", {2, 3, 1})});
  const auto plan =
      QueryPlan::join(QueryPlan::leaf("A"), QueryPlan::leaf("B"), kAeqB);
  EXPECT_DOUBLE_EQ(estimate_indexed(sample, plan), 0.0);
  EXPECT_DOUBLE_EQ(estimate_practitioner(sample, plan), 3.0 / 9.0);
  const auto none = QueryPlan::join(
      QueryPlan::leaf("A", clause("C", Op::kGt, 5)), QueryPlan::leaf("B"), kAeqB);
  EXPECT_DOUBLE_EQ(estimate_practitioner(sample, none), 0.0);
}

TEST(Estimators, UnusedSampleTablesAreIgnored) {
  const auto sample = sample_of(2, {column_table("A", {1, 2}),
                                    column_table("B", {7, 7})});
  EXPECT_DOUBLE_EQ(estimate_indexed(sample, QueryPlan::leaf("A", clause("C", Op::kEq, 2))),
                   0.5);
}

TEST(EstimateAllNodes, RecordsPerSubplanWithExactCrossCheck) {
  const auto a = column_table("A", {1, 2, 3, 4, 5, 6});
  const auto b = column_table("B", {2, 4, 6, 8});
  const auto db = catalog_of({a, b});
  const auto sample = create_sample(5, {a, b}, 42);
  const auto plan = QueryPlan::join(QueryPlan::leaf("A", clause("C", Op::kGe, 3)),
                                    QueryPlan::leaf("B"), kAeqB);
  const auto recs = estimate_all_nodes(sample, plan, &db);
  ASSERT_EQ(recs.size(), 3u);
  const auto nodes = subplans(plan);
  for (std::size_t i = 0; i < 3; ++i) {
    ASSERT_TRUE(recs[i].exact.has_value());
    EXPECT_DOUBLE_EQ(*recs[i].exact, exact_selectivity(db, nodes[i]));
    EXPECT_DOUBLE_EQ(recs[i].est_indexed, estimate_indexed(sample, nodes[i]));
    EXPECT_DOUBLE_EQ(recs[i].est_practitioner,
                     estimate_practitioner(sample, nodes[i]));
    EXPECT_EQ(recs[i].s, 5u);
    EXPECT_GE(recs[i].est_indexed, 0.0);
    EXPECT_LE(recs[i].est_indexed, 1.0);
  }
  EXPECT_EQ(recs[0].node_kind, "select");
  EXPECT_EQ(recs[2].node_kind, "join");
  EXPECT_EQ(*recs[2].cardinality_exact, 2u);
  EXPECT_FALSE(estimate_all_nodes(sample, plan)[0].exact.has_value());
}

TEST(EstimateAllNodes, CsvFormat) {
  const auto sample = sample_of(3, {column_table("A", {1, 2, 3})});
  std::ostringstream out;
  write_estimates_header(out);
  write_estimates(out, 7, estimate_all_nodes(sample, QueryPlan::leaf("A", clause("C", Op::kLt, 3))), 9);
  EXPECT_EQ(out.str(),
            "query_id,node_id,node_kind,exact,est_indexed,est_practitioner,s,seed\n"
            "7,0,select,,0.666666666667,0.666666666667,3,9\n");
}

TEST(Properties, EngineMatchesBruteForce) {
  const auto r = testing::engine_equivalence(99, 400, 5);
  EXPECT_EQ(r.mismatches, 0u) << r.first;
}

TEST(Properties, IndexedEstimateEqualsAlignedSampleSelectivity) {
  const auto r = testing::aligned_equivalence(7, 400, 6, 5);
  EXPECT_EQ(r.mismatches, 0u) << r.first;
}

QueryPlan and_onto_leaf(const QueryPlan& plan, const std::string& table,
                        const BoolExpr& extra) {
  if (plan.is_leaf()) {
    if (plan.table() != table) return plan;
    return QueryPlan::leaf(table, plan.predicate() ? *plan.predicate() && extra
                                                   : extra);
  }
  return QueryPlan::join(and_onto_leaf(plan.left(), table, extra),
                         and_onto_leaf(plan.right(), table, extra),
                         plan.condition());
}

TEST(Properties, AddingAndClauseNeverIncreasesSelectivity) {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 300; ++k) {
    const auto inst = testing::random_instance(rng, 3, 5, 3, 1);
    const Table& t = *inst.tables[rng() % inst.tables.size()];
    const BoolExpr extra = testing::random_predicate(rng, t, 1, 4);
    const auto narrower = and_onto_leaf(inst.plan, t.name(), extra);
    EXPECT_LE(exact_selectivity(inst.db, narrower),
              exact_selectivity(inst.db, inst.plan));
  }
}

// Sample sized from the class bound with eps = delta = 0.1; the share of
// queries off by more than eps stays within delta plus three binomial
// standard errors (0.1 + 3 * 0.03).
TEST(Properties, EpsilonGuaranteeOnUniformTable) {
  Catalog db;
  auto t = std::make_shared<const Table>(
      generate_uniform_table("T", 100000, 4, {0, 200000}, 17));
  db.add(t);
  WorkloadSpec spec;
  spec.m = 2;
  spec.b = 3;
  spec.count = 100;
  spec.seed = 23;
  spec.tables = {"T"};
  const auto plans = generate_workload(spec, db);

  SampleSizeSpec size;
  size.epsilon = 0.1;
  size.delta = 0.1;
  size.d = double(bound_select_boolean(2, 3).dimension());
  const auto s = sample_size_eps(size);
  const auto sample = create_sample(s, {t}, 31);
  int misses = 0;
  for (const auto& q : plans) {
    if (std::abs(estimate_indexed(sample, q) - exact_selectivity(db, q)) > 0.1) {
      ++misses;
    }
  }
  EXPECT_LE(misses, 19) << "s=" << s;
}

}  // namespace
}  // namespace vcsel

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "gtest/gtest.h"

#include "vcsel/estimator.hpp"
#include "vcsel/generators.hpp"
#include "vcsel/histogram.hpp"

namespace vcsel {
namespace {

using Op = ComparisonOp;

std::vector<Value> iota_values(Value from, Value to) {
  std::vector<Value> v(std::size_t(to - from + 1));
  std::iota(v.begin(), v.end(), from);
  return v;
}

double exact_fraction(const std::vector<Value>& values, Op op, Value c) {
  std::size_t hits = 0;
  for (Value v : values) hits += compare(v, op, c) ? 1 : 0;
  return double(hits) / double(values.size());
}

TEST(BuildStats, SingleRepeatedValue) {
  const auto s = build_column_stats(std::vector<Value>(40, 9), 10, 5);
  ASSERT_EQ(s.mcv.entries.size(), 1u);
  EXPECT_EQ(s.mcv.entries[0], (McvEntry{9, 1.0}));
  EXPECT_EQ(s.histogram.bucket_count(), 0u);
  EXPECT_EQ(s.n_distinct, 1u);
}

TEST(BuildStats, EquiDepthBuckets) {
  const auto s = build_column_stats(iota_values(1, 100), 4, 0);
  EXPECT_TRUE(s.mcv.entries.empty());
  EXPECT_EQ(s.histogram.bucket_count(), 4u);
  EXPECT_DOUBLE_EQ(s.histogram.bucket_fraction(), 0.25);
  EXPECT_TRUE(std::is_sorted(s.histogram.boundaries.begin(),
                             s.histogram.boundaries.end()));
}

TEST(BuildStats, SkewedColumnPutsHeavyValueInMcv) {
  std::vector<Value> values(500, 7);
  const auto rest = iota_values(100, 599);
  values.insert(values.end(), rest.begin(), rest.end());
  std::shuffle(values.begin(), values.end(), std::mt19937_64(3));
  const auto s = build_column_stats(values, 10, 1);
  ASSERT_EQ(s.mcv.entries.size(), 1u);
  EXPECT_EQ(s.mcv.entries[0], (McvEntry{7, 0.5}));
  EXPECT_DOUBLE_EQ(s.histogram.non_mcv_fraction, 0.5);
  EXPECT_EQ(s.n_distinct, 501u);
  EXPECT_DOUBLE_EQ(estimate_clause(s, Op::kEq, 7), 0.5);
  EXPECT_NEAR(estimate_clause(s, Op::kLe, 99), 0.5, 1e-12);
}

TEST(BuildStats, McvTiesPreferSmallerValues) {
  const auto s = build_column_stats({5, 5, 3, 3, 9, 9, 1}, 2, 2);
  ASSERT_EQ(s.mcv.entries.size(), 2u);
  EXPECT_EQ(s.mcv.entries[0].value, 3);
  EXPECT_EQ(s.mcv.entries[1].value, 5);
}

TEST(BuildStats, RejectsEmptyInput) {
  EXPECT_THROW(build_column_stats({}, 4, 4), ValidationError);
  EXPECT_THROW(build_column_stats({1}, 0, 4), ValidationError);
  EXPECT_THROW(build_stats(Table("T", {{"A", {0, 1}}}, {})), ValidationError);
}

TEST(EstimateClause, Examples) {
  const auto values = iota_values(1, 100);
  const auto s = build_column_stats(values, 4, 0);
  EXPECT_DOUBLE_EQ(estimate_clause(s, Op::kLe, 25), 0.25);
  EXPECT_DOUBLE_EQ(exact_fraction(values, Op::kLe, 25), 0.25);
  EXPECT_NEAR(estimate_clause(s, Op::kLe, 100), 1.0, 1e-12);
  EXPECT_NEAR(estimate_clause(s, Op::kLe, 1000), 1.0, 1e-12);
  EXPECT_DOUBLE_EQ(estimate_clause(s, Op::kLt, 1), 0.0);
  EXPECT_DOUBLE_EQ(estimate_clause(s, Op::kEq, 50), 0.01);
  EXPECT_DOUBLE_EQ(estimate_clause(s, Op::kNe, 50), 0.99);
  EXPECT_DOUBLE_EQ(estimate_clause(s, Op::kEq, 500), 0.0);
}

TEST(EstimateClause, ComplementaryOperatorsSumToOne) {
  const auto t = generate_uniform_table("T", 2000, 1, {0, 300}, 5);
  const auto stats = build_stats(t, 20, 10);
  const auto& s = stats.get("T", "C1");
  for (Value c = -5; c <= 305; c += 7) {
    EXPECT_NEAR(estimate_clause(s, Op::kLe, c) + estimate_clause(s, Op::kGt, c),
                1.0, 1e-12);
    EXPECT_NEAR(estimate_clause(s, Op::kLt, c) + estimate_clause(s, Op::kGe, c),
                1.0, 1e-12);
    EXPECT_NEAR(estimate_clause(s, Op::kEq, c) + estimate_clause(s, Op::kNe, c),
                1.0, 1e-12);
  }
}

TEST(StatsInvariants, MassConservation) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    std::uniform_int_distribution<Value> val(0, 1 + trial * 3);
    std::vector<Value> values(1 + rng() % 500);
    for (auto& v : values) v = val(rng);
    const auto s = build_column_stats(values, 1 + rng() % 30, rng() % 20);
    EXPECT_NEAR(s.mcv.total() + s.histogram.non_mcv_fraction, 1.0, 1e-9);
    EXPECT_LE(s.mcv.entries.size(), s.mcv.capacity);
    EXPECT_TRUE(std::is_sorted(
        s.mcv.entries.begin(), s.mcv.entries.end(),
        [](const McvEntry& a, const McvEntry& b) { return a.frequency > b.frequency; }));
  }
}

// All-distinct values with no MCV list: every A <= x estimate is within one
// bucket's mass of the truth. Columns with fewer values than buckets are
// skipped since a single value then outweighs a bucket.
TEST(StatsInvariants, EquiDepthErrorBelowOneBucket) {
  std::mt19937_64 rng(12);
  for (std::size_t buckets : {1u, 3u, 4u, 10u, 100u}) {
    for (std::size_t n : {7u, 100u, 101u, 1234u, 5003u}) {
      if (n < buckets) continue;
      std::vector<Value> values(n);
      std::uniform_int_distribution<Value> gap(1, 9);
      Value v = 0;
      for (auto& x : values) x = v += gap(rng);
      std::shuffle(values.begin(), values.end(), rng);
      const auto s = build_column_stats(values, buckets, 0);
      for (Value x = -1; x <= v + 1; ++x) {
        ASSERT_LE(std::abs(estimate_clause(s, Op::kLe, x) -
                           exact_fraction(values, Op::kLe, x)),
                  1.0 / double(buckets) + 1e-12)
            << "B=" << buckets << " n=" << n << " x=" << x;
      }
    }
  }
}

TEST(EstimatePredicate, CombinationRules) {
  // Values 1..100 all in the MCV list, so estimates are exact counts.
  const Table t("T", {{"A", {0, 200}}, {"B", {0, 200}}},
                [] {
                  std::vector<Value> cells;
                  for (Value v = 1; v <= 100; ++v) {
                    cells.push_back(v);
                    cells.push_back(101 - v);
                  }
                  return cells;
                }());
  const auto stats = build_stats(t, 100, 100);
  const auto a = clause("A", Op::kLe, 50);
  const auto b = clause("B", Op::kGt, 50);
  EXPECT_NEAR(estimate_predicate(stats, "T", a && b), 0.25, 1e-12);
  EXPECT_DOUBLE_EQ(estimate_predicate(stats, "T", a),
                   estimate_clause(stats.get("T", "A"), a.clause()));
  const auto wide1 = clause("A", Op::kLe, 70);
  const auto wide2 = clause("B", Op::kLe, 60);
  EXPECT_DOUBLE_EQ(estimate_predicate(stats, "T", wide1 || wide2), 1.0);
  EXPECT_THROW(estimate_predicate(stats, "T", clause("Z", Op::kLe, 1)),
               ValidationError);
}

TEST(EstimateJoin, Factors) {
  Catalog db;
  std::vector<Value> cells = iota_values(1, 100);
  db.add(Table("A", {{"C", {0, 200}}}, cells));
  db.add(Table("B", {{"C", {0, 200}}}, cells));
  StatsCatalog stats(100, 100);
  build_stats(stats, db.get("A"));
  build_stats(stats, db.get("B"));
  const JoinCondition eq{{"A", "C"}, Op::kEq, {"B", "C"}};
  EXPECT_DOUBLE_EQ(
      estimate_join(stats, QueryPlan::join(QueryPlan::leaf("A"),
                                           QueryPlan::leaf("B"), eq)),
      0.01);
  EXPECT_NEAR(estimate_join(stats, QueryPlan::join(
                                       QueryPlan::leaf("A", clause("C", Op::kLe, 50)),
                                       QueryPlan::leaf("B", clause("C", Op::kGt, 50)),
                                       eq)),
              0.0025, 1e-12);
  EXPECT_DOUBLE_EQ(
      estimate_join(stats, QueryPlan::join(QueryPlan::leaf("A"), QueryPlan::leaf("B"),
                                           {{"A", "C"}, Op::kLt, {"B", "C"}})),
      1.0 / 3.0);
  EXPECT_DOUBLE_EQ(
      estimate_join(stats, QueryPlan::join(QueryPlan::leaf("A"), QueryPlan::leaf("B"),
                                           {{"A", "C"}, Op::kNe, {"B", "C"}})),
      0.99);
}

// Independent uniform columns satisfy the baseline's assumptions, so AND
// queries over distinct columns are estimated well.
TEST(EstimatePredicate, UniformIndependentAndWorkload) {
  Catalog db;
  db.add(generate_uniform_table("T", 100000, 4, {0, 200000}, 41));
  const auto stats = build_stats(db.get("T"), 100, 100);
  std::mt19937_64 rng(43);
  std::uniform_int_distribution<Value> constant(0, 200000);
  int good = 0;
  for (int q = 0; q < 100; ++q) {
    std::vector<std::string> cols = {"C1", "C2", "C3", "C4"};
    std::shuffle(cols.begin(), cols.end(), rng);
    const std::size_t k = 2 + rng() % 3;
    BoolExpr e = clause(cols[0], kAllOps[rng() % 6], constant(rng));
    for (std::size_t i = 1; i < k; ++i) {
      e = std::move(e) && clause(cols[i], kAllOps[rng() % 6], constant(rng));
    }
    const auto plan = QueryPlan::leaf("T", e);
    if (std::abs(estimate_join(stats, plan) - exact_selectivity(db, plan)) <= 0.05) {
      ++good;
    }
  }
  EXPECT_GE(good, 95);
}

TEST(DumpStats, RoundTripIsExact) {
  StatsCatalog stats(16, 5);
  build_stats(stats, generate_uniform_table("A", 3000, 3, {0, 50}, 2));
  build_stats(stats, generate_correlated_table("B", 3000, 100.0,
                                               {{{400, 360}, {360, 400}}},
                                               {0, 200}, 3));
  std::ostringstream first;
  dump_stats(first, stats);
  std::istringstream in(first.str());
  const auto back = load_stats(in);
  EXPECT_TRUE(back == stats);
  std::ostringstream second;
  dump_stats(second, back);
  EXPECT_EQ(first.str(), second.str());
}

TEST(DumpStats, RejectsMalformedInput) {
  std::istringstream bad("stats buckets=4 mcv=2\nnonsense line\n");
  EXPECT_THROW(load_stats(bad), Error);
  std::istringstream empty("");
  EXPECT_THROW(load_stats(empty), Error);
}

}  // namespace
}  // namespace vcsel

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include <unistd.h>

#include "gtest/gtest.h"

#include "vcsel/csv.hpp"
#include "vcsel/generators.hpp"
#include "vcsel/sampler.hpp"

namespace vcsel {
namespace {

std::shared_ptr<const Table> table(std::string name, std::size_t rows,
                                   std::size_t cols, std::uint64_t seed) {
  return std::make_shared<const Table>(
      generate_uniform_table(std::move(name), rows, cols, {0, 1000}, seed));
}

std::set<std::vector<Value>> row_set(const Table& t) {
  std::set<std::vector<Value>> out;
  for (std::size_t r = 0; r < t.row_count(); ++r) {
    auto row = t.row(r);
    out.emplace(row.begin(), row.end());
  }
  return out;
}

TEST(CreateSample, SingleRowTableRepeatsThatRow) {
  auto t = std::make_shared<const Table>(
      Table("T", {{"A", {0, 9}}, {"B", {0, 9}}}, {4, 7}));
  const auto db = create_sample(3, {t}, 1);
  const auto& st = db.table("T");
  ASSERT_EQ(st.size(), 3u);
  for (std::size_t i = 1; i <= 3; ++i) {
    EXPECT_EQ(st.at_index(i)[0], 4);
    EXPECT_EQ(st.at_index(i)[1], 7);
  }
}

TEST(CreateSample, TwoTablesShareSize) {
  const auto db = create_sample(5, {table("A", 20, 2, 1), table("B", 7, 3, 2)}, 9);
  EXPECT_EQ(db.size(), 5u);
  ASSERT_EQ(db.tables().size(), 2u);
  for (const auto& st : db.tables()) EXPECT_EQ(st.size(), 5u);
  EXPECT_EQ(db.catalog().names(), (std::vector<std::string>{"A", "B"}));
}

TEST(CreateSample, RejectsEmptyTablesAndZeroSize) {
  auto empty = std::make_shared<const Table>(Table("E", {{"A", {0, 1}}}, {}));
  EXPECT_THROW(create_sample(3, {empty}, 1), ValidationError);
  EXPECT_THROW(create_sample(0, {table("A", 5, 1, 1)}, 1), ValidationError);
}

TEST(CreateSample, BalancedBinaryColumnProportion) {
  std::vector<Value> cells(1000);
  for (std::size_t i = 0; i < cells.size(); ++i) cells[i] = Value(i % 2);
  auto t = std::make_shared<const Table>(
      Table("T", {{"A", {0, 1}}}, std::move(cells)));
  const auto db = create_sample(10000, {t}, 20240601);
  double ones = 0;
  for (Value v : db.table("T").rows().cells()) ones += double(v);
  // Binomial standard error sqrt(0.25 / 1e4) = 0.005; 0.02 is four of them.
  EXPECT_NEAR(ones / 10000.0, 0.5, 0.02);
}

TEST(CreateSample, RowsComeFromBaseTable) {
  auto base = table("A", 50, 3, 4);
  const auto db = create_sample(200, {base}, 5);
  const auto rows = row_set(*base);
  const Table& s = db.table("A").rows();
  for (std::size_t r = 0; r < s.row_count(); ++r) {
    auto row = s.row(r);
    EXPECT_TRUE(rows.count(std::vector<Value>(row.begin(), row.end())));
  }
}

TEST(CreateSample, DeterministicPerSeed) {
  const std::vector<std::shared_ptr<const Table>> bases = {table("A", 100, 2, 1),
                                                           table("B", 80, 1, 2)};
  const auto x = create_sample(64, bases, 77);
  const auto y = create_sample(64, bases, 77);
  const auto z = create_sample(64, bases, 78);
  for (std::size_t j = 0; j < 2; ++j) {
    EXPECT_TRUE(x.tables()[j].rows().same_contents(y.tables()[j].rows()));
  }
  EXPECT_FALSE(x.tables()[0].rows().same_contents(z.tables()[0].rows()));
  EXPECT_EQ(x.seed(), 77u);
}

TEST(CreateSample, AppendingTableKeepsEarlierDraws) {
  auto a = table("A", 100, 2, 1);
  auto b = table("B", 100, 2, 2);
  auto c = table("C", 100, 2, 3);
  const auto two = create_sample(40, {a, b}, 11);
  const auto three = create_sample(40, {a, b, c}, 11);
  EXPECT_TRUE(two.table("A").rows().same_contents(three.table("A").rows()));
  EXPECT_TRUE(two.table("B").rows().same_contents(three.table("B").rows()));
}

// Each base row is drawn with probability 1 / n per draw; pooled over many
// seeds the counts stay within four binomial standard errors.
TEST(CreateSample, UniformOverBaseRows) {
  constexpr std::size_t n = 10;
  constexpr std::size_t s = 100;
  constexpr std::size_t seeds = 200;
  std::vector<Value> cells(n);
  for (std::size_t i = 0; i < n; ++i) cells[i] = Value(i);
  auto t = std::make_shared<const Table>(Table("T", {{"A", {0, 9}}}, cells));
  std::vector<double> counts(n, 0.0);
  for (std::size_t seed = 0; seed < seeds; ++seed) {
    const auto db = create_sample(s, {t}, seed);
    for (Value v : db.table("T").rows().cells()) counts[std::size_t(v)] += 1.0;
  }
  const double draws = double(s * seeds);
  const double p = 1.0 / n;
  const double se = std::sqrt(draws * p * (1 - p));
  for (std::size_t i = 0; i < n; ++i) {
    EXPECT_NEAR(counts[i], draws * p, 4.0 * se) << "row " << i;
  }
}

TEST(AlignedTuple, OneRowPerTableWithMatchingIndex) {
  const auto db = create_sample(6, {table("A", 30, 2, 1), table("B", 30, 1, 2)}, 3);
  for (std::size_t i = 1; i <= 6; ++i) {
    const auto tup = aligned_tuple(db, i);
    ASSERT_EQ(tup.size(), 2u);
    EXPECT_EQ(tup[0].data(), db.table("A").rows().row(i - 1).data());
    EXPECT_EQ(tup[1].data(), db.table("B").rows().row(i - 1).data());
  }
  EXPECT_THROW(aligned_tuple(db, 0), ValidationError);
  EXPECT_THROW(aligned_tuple(db, 7), ValidationError);
}

TEST(AlignedTuple, CoversEverySampleRowOnce) {
  const auto db = create_sample(9, {table("A", 4, 1, 1)}, 3);
  std::set<const Value*> seen;
  for (std::size_t i = 1; i <= 9; ++i) seen.insert(aligned_tuple(db, i)[0].data());
  EXPECT_EQ(seen.size(), 9u);
}

class SampleFiles : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() /
           ("vcsel_sample_" + std::to_string(::getpid()));
    std::filesystem::remove_all(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }
  std::filesystem::path dir_;
};

TEST_F(SampleFiles, SaveLoadRoundTrip) {
  const auto db = create_sample(25, {table("A", 30, 2, 1), table("B", 9, 3, 2)}, 8);
  save_sample(dir_, db);
  const auto back = load_sample(dir_ / "manifest.txt");
  EXPECT_EQ(back.size(), 25u);
  EXPECT_EQ(back.seed(), 8u);
  for (const auto& name : {"A", "B"}) {
    EXPECT_TRUE(back.table(name).rows().same_contents(db.table(name).rows()));
  }
  std::ifstream in(dir_ / "A.csv");
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "sampleindex,C1,C2");
}

TEST_F(SampleFiles, LoadAcceptsShuffledRowsAndRejectsBadIndexes) {
  const auto db = create_sample(3, {table("A", 5, 1, 1)}, 2);
  save_sample(dir_, db);
  const auto& rows = db.table("A").rows();
  {
    std::ofstream out(dir_ / "A.csv", std::ios::trunc);
    out << "sampleindex,C1\n"
        << "3," << rows.at(2, 0) << "\n1," << rows.at(0, 0) << "\n2,"
        << rows.at(1, 0) << "\n";
  }
  EXPECT_TRUE(load_sample(dir_ / "manifest.txt")
                  .table("A")
                  .rows()
                  .same_contents(rows));
  {
    std::ofstream out(dir_ / "A.csv", std::ios::trunc);
    out << "sampleindex,C1\n1,0\n1,0\n2,0\n";
  }
  EXPECT_THROW(load_sample(dir_ / "manifest.txt"), Error);
  EXPECT_THROW(load_sample(dir_ / "missing.txt"), Error);
}

}  // namespace
}  // namespace vcsel

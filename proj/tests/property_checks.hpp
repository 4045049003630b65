#pragma once

// Randomized equivalence sweeps shared by the unit tests and the acceptance
// runner. Each returns the number of instances that disagreed with the
// brute-force oracle, and records the first disagreement.

#include <cstdint>
#include <random>
#include <string>

#include "test_util.hpp"

namespace vcsel::testing {

struct SweepResult {
  std::size_t instances = 0;
  std::size_t mismatches = 0;
  std::string first;
};

// execute_plan over full tables against the Cartesian-product filter.
inline SweepResult engine_equivalence(std::uint64_t seed, std::size_t count,
                                      std::size_t max_rows) {
  std::mt19937_64 rng(seed);
  SweepResult r;
  for (std::size_t k = 0; k < count; ++k) {
    const auto inst = random_instance(rng, 3, max_rows, 3);
    const auto got = rows_of(execute_plan(inst.db, inst.plan));
    const auto want = brute_force(inst.db, inst.plan);
    ++r.instances;
    if (got != want) {
      if (r.mismatches++ == 0) r.first = to_sql(inst.plan);
    }
  }
  return r;
}

// estimate_indexed against the plan evaluated over the aligned tuples of a
// sample, compared as integer numerators over the common denominator s.
inline SweepResult aligned_equivalence(std::uint64_t seed, std::size_t count,
                                       std::size_t max_rows,
                                       std::size_t max_s) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> size(1, max_s);
  SweepResult r;
  for (std::size_t k = 0; k < count; ++k) {
    const auto inst = random_instance(rng, 3, max_rows, 3, 1);
    const std::size_t s = size(rng);
    const auto sample = create_sample(s, inst.tables, rng());
    const std::uint64_t oracle = brute_force_aligned(sample, inst.plan);
    const double est = estimate_indexed(sample, inst.plan);
    ++r.instances;
    if (count_aligned(sample, inst.plan) != oracle ||
        est != double(oracle) / double(s)) {
      if (r.mismatches++ == 0) r.first = to_sql(inst.plan);
    }
  }
  return r;
}

}  // namespace vcsel::testing

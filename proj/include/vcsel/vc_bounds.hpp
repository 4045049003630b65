#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "vcsel/errors.hpp"
#include "vcsel/query.hpp"

namespace vcsel {

using BigInt = boost::multiprecision::cpp_int;

// Sum_{i=0}^{d} C(n, i): the number of subsets of size at most d of an
// n-point set. Equals 2^n once d >= n.
inline BigInt growth_function(std::uint64_t d, std::uint64_t n) {
  if (d >= n) return BigInt(1) << static_cast<unsigned>(n);
  BigInt term = 1;
  BigInt sum = 1;
  for (std::uint64_t i = 1; i <= d; ++i) {
    term = term * (n - i + 1) / i;
    sum += term;
  }
  return sum;
}

struct VcBoundReport {
  std::string formula_id;
  double bound = 0.0;
  double log_base = 2.0;
  // Whichever inputs the formula consumed.
  std::optional<ClassParams> params;
  std::vector<double> dims;

  // Integer dimension handed to sample sizing.
  std::uint64_t dimension() const {
    return static_cast<std::uint64_t>(std::ceil(bound - 1e-9));
  }
};

namespace detail {

inline double log_in(double x, double base) {
  if (!(base > 1.0)) throw ValidationError("log base must be > 1");
  return std::log(x) / std::log(base);
}

// 3 k log(k): the shared shape of the Boolean-combination bounds.
inline double three_k_log_k(double k, double base) {
  return 3.0 * k * log_in(k, base);
}

}  // namespace detail

// Single-clause selections over m columns behave like half-spaces in m
// dimensions.
inline VcBoundReport bound_select_single(std::size_t m,
                                         double log_base = 2.0) {
  if (m < 1) throw ValidationError("bound_select_single needs m >= 1");
  VcBoundReport r;
  r.formula_id = "select-single";
  r.bound = static_cast<double>(m) + 1.0;
  r.log_base = log_base;
  r.params = ClassParams{1, m, 1};
  return r;
}

// Ranges built from unions and intersections of h ranges of a base space
// with VC-dimension d.
inline VcBoundReport bound_boolean_combination(double d, std::size_t h,
                                               double log_base = 2.0) {
  if (d < 2.0) throw ValidationError("boolean combination needs d >= 2");
  if (h < 1) throw ValidationError("boolean combination needs h >= 1");
  VcBoundReport r;
  r.formula_id = "boolean-combination";
  r.log_base = log_base;
  r.dims = {d};
  const double dh = d * static_cast<double>(h);
  r.bound = dh == 1.0 ? d : detail::three_k_log_k(dh, log_base);
  return r;
}

// Selections whose predicate combines b clauses over m columns. With b = 1
// the single-clause bound m + 1 also applies and the smaller one is kept.
inline VcBoundReport bound_select_boolean(std::size_t m, std::size_t b,
                                          double log_base = 2.0) {
  if (m < 1 || b < 1) {
    throw ValidationError("bound_select_boolean needs m >= 1 and b >= 1");
  }
  VcBoundReport r;
  r.formula_id = "select-boolean";
  r.log_base = log_base;
  r.params = ClassParams{1, m, b};
  const double k = (static_cast<double>(m) + 1.0) * static_cast<double>(b);
  r.bound = detail::three_k_log_k(k, log_base);
  if (b == 1) {
    const double single = static_cast<double>(m) + 1.0;
    if (single < r.bound) {
      r.bound = single;
      r.formula_id = "select-single";
    }
  }
  return r;
}

// Theta-joins of two tables whose select classes have dimensions v1, v2.
inline VcBoundReport bound_join_pair(double v1, double v2,
                                     double log_base = 2.0) {
  if (v1 < 2.0 || v2 < 2.0) {
    throw ValidationError("bound_join_pair needs both dimensions >= 2");
  }
  VcBoundReport r;
  r.formula_id = "join-pair";
  r.log_base = log_base;
  r.dims = {v1, v2};
  r.bound = detail::three_k_log_k(v1 + v2, log_base);
  return r;
}

// Plans over u tables joined by u-1 conditions. m is the widest table; the
// formula assumes m <= sum of dims. For u = 2 the pairwise bound is also
// valid and the smaller is returned.
inline VcBoundReport bound_multi_join(std::size_t u,
                                      const std::vector<double>& dims,
                                      std::size_t m, double log_base = 2.0) {
  if (u < 2) throw ValidationError("bound_multi_join needs u >= 2");
  if (dims.size() != u) {
    throw ValidationError("bound_multi_join needs one dimension per table");
  }
  const double sum = std::accumulate(dims.begin(), dims.end(), 0.0);
  if (std::any_of(dims.begin(), dims.end(), [](double v) { return v <= 0; })) {
    throw ValidationError("dimensions must be positive");
  }
  if (static_cast<double>(m) > sum) {
    throw ValidationError("assumption violated: m = " + std::to_string(m) +
                          " exceeds the sum of table dimensions");
  }
  VcBoundReport r;
  r.formula_id = "multi-join";
  r.log_base = log_base;
  r.dims = dims;
  r.params = ClassParams{u, m, 0};
  const double ud = static_cast<double>(u);
  r.bound = 4.0 * ud * sum * detail::log_in(ud * sum, log_base);
  if (u == 2 && dims[0] >= 2.0 && dims[1] >= 2.0) {
    const auto pair = bound_join_pair(dims[0], dims[1], log_base);
    if (pair.bound < r.bound) {
      r.bound = pair.bound;
      r.formula_id = "join-pair";
    }
  }
  return r;
}

// Queries with up to u selections and u-1 joins, each selection over at
// most m columns and b clauses. u = 1 reduces to the selection bound.
inline VcBoundReport bound_general(std::size_t u, std::size_t m,
                                   std::size_t b, double log_base = 2.0) {
  if (u < 1 || m < 1 || b < 1) {
    throw ValidationError("bound_general needs u, m, b >= 1");
  }
  if (u == 1) {
    auto r = bound_select_boolean(m, b, log_base);
    r.params = ClassParams{1, m, b};
    return r;
  }
  const double k = (static_cast<double>(m) + 1.0) * static_cast<double>(b);
  const double inner = k * detail::log_in(k, log_base);
  const double u2 = static_cast<double>(u) * static_cast<double>(u);
  VcBoundReport r;
  r.formula_id = "general";
  r.log_base = log_base;
  r.params = ClassParams{u, m, b};
  r.bound = 12.0 * u2 * inner * detail::log_in(3.0 * u2 * inner, log_base);
  return r;
}

struct SampleSizeSpec {
  double epsilon = 0.05;
  double delta = 0.05;
  double c = 0.5;
  double d = 1.0;
  // Relative (p, epsilon) mode.
  std::optional<double> p;
  double c_prime = 0.5;
  std::optional<std::uint64_t> population;
};

namespace detail {

inline void check_spec(const SampleSizeSpec& s) {
  if (!(s.epsilon > 0.0 && s.epsilon < 1.0)) {
    throw ValidationError("epsilon must lie in (0, 1)");
  }
  if (!(s.delta > 0.0 && s.delta < 1.0)) {
    throw ValidationError("delta must lie in (0, 1)");
  }
  if (!(s.d > 0.0)) throw ValidationError("d must be positive");
  if (s.population && *s.population == 0) {
    throw ValidationError("population must be positive");
  }
}

inline std::uint64_t clamp_to_population(double raw,
                                         const SampleSizeSpec& s) {
  auto size = static_cast<std::uint64_t>(std::ceil(raw));
  if (size < 1) size = 1;
  if (s.population) size = std::min(size, *s.population);
  return size;
}

}  // namespace detail

// Sample size for an epsilon-approximation with probability 1 - delta:
// ceil(c / eps^2 * (d + ln(1/delta))), capped at the population size.
inline std::uint64_t sample_size_eps(const SampleSizeSpec& spec) {
  detail::check_spec(spec);
  if (!(spec.c > 0.0)) throw ValidationError("c must be positive");
  const double raw = spec.c / (spec.epsilon * spec.epsilon) *
                     (spec.d + std::log(1.0 / spec.delta));
  return detail::clamp_to_population(raw, spec);
}

// Sample size for a relative (p, eps)-approximation:
// ceil(c' / (eps^2 p) * (d ln(1/p) + ln(1/delta))), capped at the population.
inline std::uint64_t sample_size_rel(const SampleSizeSpec& spec) {
  detail::check_spec(spec);
  if (!spec.p || !(*spec.p > 0.0 && *spec.p < 1.0)) {
    throw ValidationError("relative mode needs p in (0, 1)");
  }
  if (!(spec.c_prime > 0.0)) throw ValidationError("c' must be positive");
  const double p = *spec.p;
  const double raw = spec.c_prime / (spec.epsilon * spec.epsilon * p) *
                     (spec.d * std::log(1.0 / p) + std::log(1.0 / spec.delta));
  return detail::clamp_to_population(raw, spec);
}

}  // namespace vcsel

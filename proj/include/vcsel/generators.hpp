#pragma once

#include <array>
#include <cmath>
#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "vcsel/relation.hpp"

namespace vcsel {

using Covariance2 = std::array<std::array<double, 2>, 2>;

inline std::vector<ColumnMeta> numbered_columns(std::size_t count,
                                                Domain domain) {
  std::vector<ColumnMeta> cols;
  cols.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    cols.push_back({"C" + std::to_string(i + 1), domain});
  }
  return cols;
}

// Every cell is drawn independently and uniformly from the domain, in
// row-major order from a single seeded stream. Columns are named C1..Ck.
inline Table generate_uniform_table(std::string name, std::size_t rows,
                                    std::size_t num_columns, Domain domain,
                                    std::uint64_t seed) {
  if (num_columns < 1) throw ValidationError("need at least one column");
  if (domain.lo > domain.hi) throw ValidationError("empty domain");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Value> dist(domain.lo, domain.hi);
  std::vector<Value> cells(rows * num_columns);
  for (auto& c : cells) c = dist(rng);
  return Table(std::move(name), numbered_columns(num_columns, domain),
               std::move(cells));
}

// Two columns C1, C2 drawn from a bivariate normal with mean (mu, mu),
// rounded to the nearest integer and clamped into the domain.
inline Table generate_correlated_table(std::string name, std::size_t rows,
                                       double mu, const Covariance2& cov,
                                       Domain domain, std::uint64_t seed) {
  if (domain.lo > domain.hi) throw ValidationError("empty domain");
  const double sxx = cov[0][0], sxy = cov[0][1], syx = cov[1][0],
               syy = cov[1][1];
  const double scale = std::max({std::abs(sxx), std::abs(syy), 1.0});
  if (std::abs(sxy - syx) > 1e-12 * scale) {
    throw ValidationError("covariance matrix is not symmetric");
  }
  if (!(sxx > 0.0) || !(sxx * syy - sxy * sxy > 0.0)) {
    throw ValidationError("covariance matrix is not positive-definite");
  }
  // Cholesky factor [[a, 0], [b, c]].
  const double a = std::sqrt(sxx);
  const double b = sxy / a;
  const double c = std::sqrt(syy - b * b);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto to_cell = [&](double x) {
    const double lo = static_cast<double>(domain.lo);
    const double hi = static_cast<double>(domain.hi);
    if (!(x > lo)) return domain.lo;
    if (!(x < hi)) return domain.hi;
    return std::clamp(static_cast<Value>(std::llround(x)), domain.lo,
                      domain.hi);
  };
  std::vector<Value> cells;
  cells.reserve(rows * 2);
  for (std::size_t r = 0; r < rows; ++r) {
    const double z1 = normal(rng);
    const double z2 = normal(rng);
    cells.push_back(to_cell(mu + a * z1));
    cells.push_back(to_cell(mu + b * z1 + c * z2));
  }
  return Table(std::move(name), numbered_columns(2, domain), std::move(cells));
}

}  // namespace vcsel

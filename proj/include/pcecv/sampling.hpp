#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "pcecv/distributions.hpp"
#include "pcecv/errors.hpp"
#include "pcecv/rng.hpp"

namespace pcecv {

// Paired natural-unit and standardized samples, one row per sample point.
// `standardized` is exactly to_standard_matrix(natural, space), so training
// and later prediction standardize identical natural inputs identically.
struct DesignMatrixSample {
  Eigen::MatrixXd natural;
  Eigen::MatrixXd standardized;
};

// Latin hypercube sample of n points: per dimension, one point strictly
// inside each probability stratum [s/n, (s+1)/n), random within-stratum
// placement, random stratum-to-row assignment.
//
// Draw order (fixed for reproducibility): for each dimension in order, first
// the n within-stratum offsets, then the Fisher-Yates swaps of the stratum
// permutation. All randomness comes from one mt19937_64 stream seeded with
// `seed`.
inline DesignMatrixSample lhs_sample(int n, const InputSpace& space,
                                     std::uint64_t seed) {
  if (n < 1) throw ConfigError("lhs_sample requires n >= 1");
  space.validate();
  const int d = space.dimension();
  Rng rng(seed);

  Eigen::MatrixXd natural(n, d);
  std::vector<double> offsets(static_cast<std::size_t>(n));
  std::vector<int> perm(static_cast<std::size_t>(n));
  for (int j = 0; j < d; ++j) {
    for (int i = 0; i < n; ++i) offsets[static_cast<std::size_t>(i)] = rng.unit();
    std::iota(perm.begin(), perm.end(), 0);
    for (int i = n - 1; i > 0; --i) {
      const auto k = static_cast<int>(rng.bounded(static_cast<std::uint64_t>(i) + 1));
      std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(k)]);
    }
    const auto& m = space.marginals[static_cast<std::size_t>(j)];
    for (int i = 0; i < n; ++i) {
      const int s = perm[static_cast<std::size_t>(i)];
      const double lo = static_cast<double>(s) / n;
      const double hi = static_cast<double>(s + 1) / n;
      double u = lo + offsets[static_cast<std::size_t>(i)] * (hi - lo);
      // Rounding may land on a stratum edge; nudge back strictly inside so
      // stratification is exact and u stays in (0, 1).
      if (u <= lo) u = std::nextafter(lo, 1.0);
      if (u >= hi) u = std::nextafter(hi, 0.0);
      natural(i, j) = from_unit(u, m, j);
    }
  }
  return {natural, to_standard_matrix(natural, space)};
}

}  // namespace pcecv

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <sstream>
#include <vector>

#include "pcecv/distributions.hpp"
#include "pcecv/errors.hpp"
#include "pcecv/multi_index.hpp"
#include "pcecv/orthopoly.hpp"

namespace pcecv {

// Tensor-product polynomial basis: one family tag per dimension plus the
// ordered multi-index set.
struct BasisSpec {
  std::vector<PolyFamily> families;
  std::vector<MultiIndex> indices;

  int dimension() const { return static_cast<int>(families.size()); }
  int size() const { return static_cast<int>(indices.size()); }
};

// Uniform marginals pair with Legendre polynomials; Gaussian and Lognormal
// marginals are standardized to standard normals and pair with Hermite.
inline PolyFamily family_for(const MarginalDistribution& m) {
  return m.kind == DistKind::Uniform ? PolyFamily::Legendre : PolyFamily::Hermite;
}

inline std::vector<PolyFamily> families_for(const InputSpace& space) {
  std::vector<PolyFamily> families;
  families.reserve(space.marginals.size());
  for (const auto& m : space.marginals) families.push_back(family_for(m));
  return families;
}

// Regression matrix: entry (n, j) = ∏ᵢ Ψ_{α_{j,i}}(x⁽ⁿ⁾ᵢ) over the
// standardized sample coordinates.
inline Eigen::MatrixXd design_matrix(const Eigen::MatrixXd& std_samples,
                                     const BasisSpec& spec) {
  const int d = spec.dimension();
  const int p_count = spec.size();
  if (p_count < 1) throw ConfigError("basis must contain at least one index");
  if (std_samples.cols() != d) {
    std::ostringstream os;
    os << "sample matrix has " << std_samples.cols()
       << " columns, basis expects " << d;
    throw DataError(os.str());
  }
  std::vector<int> max_degree(static_cast<std::size_t>(d), 0);
  for (const auto& idx : spec.indices) {
    if (idx.dimension() != d) {
      throw ConfigError("multi-index dimension does not match basis dimension");
    }
    for (int i = 0; i < d; ++i) {
      max_degree[static_cast<std::size_t>(i)] =
          std::max(max_degree[static_cast<std::size_t>(i)],
                   idx.degrees[static_cast<std::size_t>(i)]);
    }
  }

  Eigen::MatrixXd psi(std_samples.rows(), p_count);
  std::vector<std::vector<double>> ladder(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) {
    ladder[static_cast<std::size_t>(i)].resize(
        static_cast<std::size_t>(max_degree[static_cast<std::size_t>(i)]) + 1);
  }
  for (Eigen::Index n = 0; n < std_samples.rows(); ++n) {
    for (int i = 0; i < d; ++i) {
      try {
        eval_univariate_all(spec.families[static_cast<std::size_t>(i)],
                            max_degree[static_cast<std::size_t>(i)],
                            std_samples(n, i),
                            ladder[static_cast<std::size_t>(i)].data());
      } catch (const DataError& e) {
        std::ostringstream os;
        os << "design row " << n << ", variable " << i << ": " << e.what();
        throw DataError(os.str());
      }
    }
    for (int j = 0; j < p_count; ++j) {
      double v = 1.0;
      const auto& degrees = spec.indices[static_cast<std::size_t>(j)].degrees;
      for (int i = 0; i < d; ++i) {
        const int k = degrees[static_cast<std::size_t>(i)];
        if (k > 0) v *= ladder[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
      }
      psi(n, j) = v;
    }
  }
  return psi;
}

}  // namespace pcecv

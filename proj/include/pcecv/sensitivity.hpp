#pragma once

#include <Eigen/Dense>

#include <utility>

#include "pcecv/errors.hpp"
#include "pcecv/multi_index.hpp"
#include "pcecv/training.hpp"

namespace pcecv {

// Mean and variance of the expansion itself: with an orthonormal basis the
// mean is the constant-term coefficient and the variance is the sum of the
// squared non-constant coefficients.
inline std::pair<double, double> pce_moments(const SparsePceModel& model) {
  double mean = 0.0;
  double variance = 0.0;
  for (std::size_t k = 0; k < model.spec.indices.size(); ++k) {
    const double beta = model.coefficients[static_cast<Eigen::Index>(k)];
    if (model.spec.indices[k].total() == 0) {
      mean = beta;
    } else {
      variance += beta * beta;
    }
  }
  return {mean, variance};
}

// Variable importances of the surrogate. These are exact functionals of the
// expansion, not of the underlying model, and should always be reported as
// surrogate Sobol indices.
struct SobolIndices {
  Eigen::VectorXd total;         // S_T,i: any term where variable i is active
  Eigen::VectorXd first_order;   // terms where only variable i is active
  Eigen::MatrixXd second_order;  // terms where exactly {i, j} are active
  double mean = 0.0;
  double variance = 0.0;
};

inline SobolIndices sobol_indices(const SparsePceModel& model) {
  const auto d = static_cast<Eigen::Index>(model.input_space.dimension());
  SobolIndices out;
  out.total = Eigen::VectorXd::Zero(d);
  out.first_order = Eigen::VectorXd::Zero(d);
  out.second_order = Eigen::MatrixXd::Zero(d, d);

  auto [mean, variance] = pce_moments(model);
  out.mean = mean;
  out.variance = variance;
  if (!(variance > 0.0))
    throw NumericalError(
        "sobol indices undefined: the expansion has zero variance");

  for (std::size_t k = 0; k < model.spec.indices.size(); ++k) {
    const MultiIndex& alpha = model.spec.indices[k];
    if (alpha.total() == 0) continue;
    const double beta = model.coefficients[static_cast<Eigen::Index>(k)];
    const double share = beta * beta / variance;

    int active_count = 0;
    int first = -1, second = -1;
    for (Eigen::Index i = 0; i < d; ++i) {
      if (alpha.degrees[static_cast<std::size_t>(i)] > 0) {
        ++active_count;
        if (first < 0) {
          first = static_cast<int>(i);
        } else if (second < 0) {
          second = static_cast<int>(i);
        }
        out.total[i] += share;
      }
    }
    if (active_count == 1) out.first_order[first] += share;
    if (active_count == 2) {
      out.second_order(first, second) += share;
      out.second_order(second, first) += share;
    }
  }
  return out;
}

}  // namespace pcecv

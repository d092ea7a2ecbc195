#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "pcecv/basis.hpp"
#include "pcecv/distributions.hpp"
#include "pcecv/errors.hpp"
#include "pcecv/multi_index.hpp"
#include "pcecv/ols.hpp"
#include "pcecv/selectors.hpp"

namespace pcecv {

// A training set: natural-scale inputs (one row per sample) with the matching
// responses.
struct ExperimentalDesign {
  Eigen::MatrixXd inputs;
  Eigen::VectorXd responses;
};

// Which per-step error drives model selection: the plain analytic
// leave-one-out estimate, or its overfitting-corrected variant.
enum class ErrorMetric { Loo, CorrectedLoo };

inline const char* to_string(ErrorMetric m) {
  return m == ErrorMetric::Loo ? "loo" : "corrected_loo";
}

struct TrainConfig {
  Selector selector = Selector::Lars;
  int p_max = 10;
  std::uint64_t seed = 0;
  ErrorMetric error_metric = ErrorMetric::CorrectedLoo;
};

// Everything recorded about how a model was chosen. `degree_errors` holds one
// (degree, best selection error) pair per candidate degree that produced an
// admissible model, in the order the degrees were visited.
struct TrainDiagnostics {
  int p_chosen = 0;
  int n_terms = 0;
  std::vector<std::pair<int, double>> degree_errors;
  double loo = std::numeric_limits<double>::quiet_NaN();
  double epsilon_icv = std::numeric_limits<double>::quiet_NaN();
  double selection_error = std::numeric_limits<double>::quiet_NaN();
  double q2_icv = std::numeric_limits<double>::quiet_NaN();
  double r2_train = std::numeric_limits<double>::quiet_NaN();
  double response_variance = std::numeric_limits<double>::quiet_NaN();
};

// A trained sparse expansion. `spec.indices` is sorted canonically and
// `coefficients` is aligned with it, so two models over the same terms are
// directly comparable regardless of activation order.
struct SparsePceModel {
  BasisSpec spec;
  Eigen::VectorXd coefficients;
  InputSpace input_space;
  TrainDiagnostics diagnostics;
  std::uint64_t seed = 0;
};

// Population variance (1/N normalizer), the convention used by every error
// ratio in this library.
inline double population_variance(const Eigen::VectorXd& y) {
  if (y.size() < 1) throw ConfigError("variance of an empty vector");
  const double mean = y.mean();
  return (y.array() - mean).square().sum() / static_cast<double>(y.size());
}

// Surrogate evaluation at natural-scale inputs (one row per point).
inline Eigen::VectorXd predict(const SparsePceModel& model,
                               const Eigen::MatrixXd& inputs) {
  if (inputs.cols() != static_cast<Eigen::Index>(model.input_space.dimension()))
    throw DataError("predict: input column count does not match the model");
  const Eigen::MatrixXd z = to_standard_matrix(inputs, model.input_space);
  return design_matrix(z, model.spec) * model.coefficients;
}

namespace detail {

// One admissible (degree, step) candidate surviving to the final comparison.
struct TrainCandidate {
  int p = 0;
  int n_terms = 0;
  double metric = std::numeric_limits<double>::infinity();
  double loo = std::numeric_limits<double>::infinity();
  double corrected = std::numeric_limits<double>::infinity();
  std::vector<MultiIndex> active;
  Eigen::VectorXd coefficients;
};

inline double metric_of(const SelectionStep& step, ErrorMetric m) {
  return m == ErrorMetric::Loo ? step.loo : step.corrected_loo;
}

// 1 - err/var, extended to degenerate (constant-response) designs: a model
// whose error is negligible against the response scale is perfect, anything
// else has no defined score.
inline double ratio_score(double err, double var, double y_scale) {
  if (var > 0.0) return 1.0 - err / var;
  const double tol = 1e-12 * (1.0 + y_scale);
  return err <= tol * tol ? 1.0 : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace detail

// Degree-adaptive sparse training. For each total degree p = 1..p_max the
// candidate basis is enumerated, the configured selector walks its path over
// the design matrix, and the best step under the configured error metric is
// kept (ties toward fewer terms). The degree loop stops early once the
// per-degree best error has increased twice in a row over consecutive
// degrees; the returned model is the global best across all visited degrees
// (ties toward lower degree, then fewer terms). Degrees where no step can be
// fit or scored are skipped; if that leaves no candidate at all, training
// fails with a numerical error.
inline SparsePceModel train(const ExperimentalDesign& ed,
                            const InputSpace& space, const TrainConfig& cfg) {
  space.validate();
  const Eigen::Index n = ed.inputs.rows();
  const int d = static_cast<int>(space.dimension());
  if (ed.inputs.cols() != static_cast<Eigen::Index>(d))
    throw DataError("train: input column count does not match the space");
  if (ed.responses.size() != n)
    throw DataError("train: response length does not match the input rows");
  if (n < 3) throw DataError("train requires at least 3 samples");
  if (cfg.p_max < 1) throw ConfigError("train requires p_max >= 1");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!std::isfinite(ed.responses[i]))
      throw DataError("train: non-finite response at row " + std::to_string(i));
  }

  const Eigen::MatrixXd z = to_standard_matrix(ed.inputs, space);
  const Eigen::VectorXd& y = ed.responses;
  const std::vector<PolyFamily> families = families_for(space);
  const double var_y = population_variance(y);

  std::vector<detail::TrainCandidate> per_degree;
  std::vector<std::pair<int, double>> degree_errors;

  for (int p = 1; p <= cfg.p_max; ++p) {
    const std::vector<MultiIndex> indices = enumerate_total_degree(d, p);
    const auto card = static_cast<Eigen::Index>(indices.size());
    if (cfg.selector == Selector::Full && card > n - 1) break;

    const Eigen::MatrixXd psi = design_matrix(z, BasisSpec{families, indices});
    detail::TrainCandidate best;

    if (cfg.selector == Selector::Full) {
      try {
        const OlsFit fit = ols_fit(psi, y);
        best.loo = loo_error(fit, y);
        best.corrected = corrected_icv_error(fit, y, static_cast<int>(card));
        best.metric =
            cfg.error_metric == ErrorMetric::Loo ? best.loo : best.corrected;
        best.p = p;
        best.n_terms = static_cast<int>(card);
        best.active = indices;
        best.coefficients = fit.coefficients;
      } catch (const NumericalError&) {
        continue;  // ill-conditioned or unscorable at this degree
      }
    } else {
      const int term_cap = static_cast<int>(std::min<Eigen::Index>(n - 1, card));
      SelectionPath path = cfg.selector == Selector::Omp
                               ? omp_path(psi, y, indices, term_cap)
                               : lars_path(psi, y, indices, term_cap);
      if (path.steps.empty()) {
        // The walk found no usable candidate (e.g. an identically-zero
        // response). The constant term is always an admissible model.
        try {
          const OlsFit fit = ols_fit(psi.col(0), y);
          SelectionStep step;
          step.active = {0};
          step.coefficients = fit.coefficients;
          step.loo = loo_error(fit, y);
          step.corrected_loo = corrected_icv_error(fit, y, 1);
          path.steps.push_back(std::move(step));
        } catch (const NumericalError&) {
          continue;
        }
      }
      std::size_t best_step = path.steps.size();
      double best_metric = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < path.steps.size(); ++j) {
        const double m = detail::metric_of(path.steps[j], cfg.error_metric);
        if (m < best_metric) {  // strict: ties keep the earlier, smaller step
          best_metric = m;
          best_step = j;
        }
      }
      if (best_step == path.steps.size()) continue;  // nothing scorable
      const SelectionStep& step = path.steps[best_step];
      best.p = p;
      best.n_terms = static_cast<int>(step.active.size());
      best.metric = best_metric;
      best.loo = step.loo;
      best.corrected = step.corrected_loo;
      best.active = path.active_indices(best_step);
      best.coefficients = step.coefficients;
    }

    per_degree.push_back(std::move(best));
    degree_errors.emplace_back(p, per_degree.back().metric);

    const std::size_t k = degree_errors.size();
    if (k >= 3) {
      const auto& [p0, e0] = degree_errors[k - 3];
      const auto& [p1, e1] = degree_errors[k - 2];
      const auto& [p2, e2] = degree_errors[k - 1];
      if (p2 == p1 + 1 && p1 == p0 + 1 && e2 > e1 && e1 > e0) break;
    }
  }

  if (per_degree.empty()) {
    throw NumericalError(
        "training found no admissible model for any candidate degree");
  }

  const detail::TrainCandidate* winner = &per_degree.front();
  for (const auto& c : per_degree) {
    const bool better =
        c.metric < winner->metric ||
        (c.metric == winner->metric &&
         (c.p < winner->p ||
          (c.p == winner->p && c.n_terms < winner->n_terms)));
    if (better) winner = &c;
  }

  // Reorder the winning terms canonically; the coefficients travel with
  // their indices, so no refit is needed and the selection error stays
  // exactly the recorded one.
  std::vector<std::size_t> order(winner->active.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return canonical_less(winner->active[a], winner->active[b]);
  });

  SparsePceModel model;
  model.input_space = space;
  model.seed = cfg.seed;
  model.spec.families = families;
  model.spec.indices.reserve(order.size());
  model.coefficients.resize(static_cast<Eigen::Index>(order.size()));
  for (std::size_t i = 0; i < order.size(); ++i) {
    model.spec.indices.push_back(winner->active[order[i]]);
    model.coefficients[static_cast<Eigen::Index>(i)] =
        winner->coefficients[static_cast<Eigen::Index>(order[i])];
  }

  TrainDiagnostics& diag = model.diagnostics;
  diag.p_chosen = winner->p;
  diag.n_terms = winner->n_terms;
  diag.degree_errors = std::move(degree_errors);
  diag.loo = winner->loo;
  diag.epsilon_icv = winner->corrected;
  diag.selection_error = winner->metric;
  diag.response_variance = var_y;
  const double y_scale = y.cwiseAbs().maxCoeff();
  diag.q2_icv = detail::ratio_score(diag.epsilon_icv, var_y, y_scale);

  const Eigen::VectorXd fitted = predict(model, ed.inputs);
  const double mse = (y - fitted).squaredNorm() / static_cast<double>(n);
  diag.r2_train = detail::ratio_score(mse, var_y, y_scale);
  return model;
}

}  // namespace pcecv

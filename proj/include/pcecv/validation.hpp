#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "pcecv/benchmarks.hpp"
#include "pcecv/errors.hpp"
#include "pcecv/parallel.hpp"
#include "pcecv/rng.hpp"
#include "pcecv/training.hpp"

namespace pcecv {

// 1 - epsilon / var(reference). May be negative for surrogates worse than
// the reference mean.
inline double q_squared(double epsilon,
                        const Eigen::VectorXd& reference_responses) {
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon))
    throw ConfigError("q_squared requires a finite error >= 0");
  const double var = population_variance(reference_responses);
  if (!(var > 0.0))
    throw NumericalError(
        "q_squared undefined: reference responses have zero variance");
  return 1.0 - epsilon / var;
}

// In-sample coefficient of determination of a trained model.
inline double r_squared_train(const SparsePceModel& model,
                              const ExperimentalDesign& ed) {
  const Eigen::VectorXd fitted = predict(model, ed.inputs);
  const Eigen::VectorXd residual = ed.responses - fitted;
  const double mse =
      residual.squaredNorm() / static_cast<double>(ed.responses.size());
  const double var = population_variance(ed.responses);
  if (var > 0.0) return 1.0 - mse / var;
  const double tol =
      1e-12 * (1.0 + ed.responses.cwiseAbs().maxCoeff());
  if (residual.cwiseAbs().maxCoeff() <= tol) return 1.0;
  throw NumericalError(
      "r_squared_train undefined: responses have zero variance");
}

// Held-out prediction error of a model on an independent test design,
// normalized by the test-response variance.
inline double q_squared_test(const SparsePceModel& model,
                             const ExperimentalDesign& test) {
  const Eigen::VectorXd pred = predict(model, test.inputs);
  const double mse = (test.responses - pred).squaredNorm() /
                     static_cast<double>(test.responses.size());
  return q_squared(mse, test.responses);
}

struct OcvFold {
  int held_out_index = -1;
  double prediction = std::numeric_limits<double>::quiet_NaN();
  double truth = std::numeric_limits<double>::quiet_NaN();
  bool ok = false;
  std::string error;
};

struct OcvReport {
  std::vector<OcvFold> per_fold;
  std::vector<int> failed_folds;
  double epsilon_ocv = std::numeric_limits<double>::quiet_NaN();
  double q2_ocv = std::numeric_limits<double>::quiet_NaN();
  double variance_reference = std::numeric_limits<double>::quiet_NaN();

  bool complete() const { return failed_folds.empty(); }
};

// Outer leave-one-out cross validation: for every sample, the entire
// training pipeline (degree loop, selector path, inner model selection) is
// rerun from scratch on the other N-1 samples and the held-out response is
// predicted by that model. A fold whose training fails is recorded but
// leaves the aggregate error undefined; the variance reference is always
// the full response vector.
inline OcvReport outer_loocv(const ExperimentalDesign& ed,
                             const InputSpace& space, const TrainConfig& cfg,
                             int threads = 1) {
  const Eigen::Index n = ed.inputs.rows();
  if (ed.responses.size() != n)
    throw DataError("outer_loocv: response length does not match inputs");
  if (n < 4) throw DataError("outer_loocv requires at least 4 samples");

  OcvReport report;
  report.per_fold.resize(static_cast<std::size_t>(n));
  report.variance_reference = population_variance(ed.responses);

  parallel_for(static_cast<int>(n), threads, [&](int fold) {
    OcvFold& out = report.per_fold[static_cast<std::size_t>(fold)];
    out.held_out_index = fold;
    out.truth = ed.responses[fold];
    ExperimentalDesign sub;
    sub.inputs.resize(n - 1, ed.inputs.cols());
    sub.responses.resize(n - 1);
    Eigen::Index w = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (i == fold) continue;
      sub.inputs.row(w) = ed.inputs.row(i);
      sub.responses[w] = ed.responses[i];
      ++w;
    }
    try {
      const SparsePceModel model = train(sub, space, cfg);
      out.prediction = predict(model, ed.inputs.row(fold))[0];
      out.ok = true;
    } catch (const Error& e) {
      out.error = e.what();
    }
  });

  double sq_sum = 0.0;
  for (const auto& fold : report.per_fold) {
    if (!fold.ok) {
      report.failed_folds.push_back(fold.held_out_index);
    } else {
      const double d = fold.prediction - fold.truth;
      sq_sum += d * d;
    }
  }
  if (report.complete()) {
    report.epsilon_ocv = sq_sum / static_cast<double>(n);
    report.q2_ocv = 1.0 - report.epsilon_ocv / report.variance_reference;
  }
  return report;
}

struct ReplicationRow {
  int n = 0;
  double q2_icv_mean = std::numeric_limits<double>::quiet_NaN();
  double q2_icv_std = std::numeric_limits<double>::quiet_NaN();
  double q2_ocv_mean = std::numeric_limits<double>::quiet_NaN();
  double q2_ocv_std = std::numeric_limits<double>::quiet_NaN();
  double q2_test_mean = std::numeric_limits<double>::quiet_NaN();
  double q2_test_std = std::numeric_limits<double>::quiet_NaN();
  int n_rep = 0;
  int failures = 0;
};

struct ReplicationTable {
  std::string problem;
  bool ocv_included = true;
  std::vector<ReplicationRow> rows;
};

struct StudyOptions {
  bool compute_ocv = true;
  int threads = 1;
};

namespace detail {

struct RepOutcome {
  bool ok = false;
  double icv = 0.0, ocv = 0.0, test = 0.0;
};

inline void mean_std(const std::vector<double>& v, double& mean,
                     double& std_dev) {
  if (v.empty()) {
    mean = std_dev = std::numeric_limits<double>::quiet_NaN();
    return;
  }
  double sum = 0.0;
  for (double x : v) sum += x;
  mean = sum / static_cast<double>(v.size());
  if (v.size() == 1) {
    std_dev = 0.0;
    return;
  }
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  std_dev = std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace detail

// Repeated-design study: for every size N and replication index, a fresh
// training design is drawn with a seed derived from (master_seed, N, rep),
// a model is trained, and its inner-CV, outer-CV and independent-test Q²
// are recorded. All replications share one test design drawn with the
// reserved label (0, 0, 1). A replication counts as failed when training
// throws or, with OCV enabled, when any of its folds fails; failed
// replications are excluded from the aggregates and counted per row.
inline ReplicationTable replication_study(const std::string& problem,
                                          const std::vector<int>& sizes,
                                          int n_rep, const TrainConfig& cfg,
                                          int n_test,
                                          std::uint64_t master_seed,
                                          const StudyOptions& opts = {}) {
  if (sizes.empty()) throw ConfigError("replication_study: no sizes given");
  if (n_rep < 1) throw ConfigError("replication_study requires n_rep >= 1");
  if (n_test < 2) throw ConfigError("replication_study requires n_test >= 2");
  const int min_n = opts.compute_ocv ? 4 : 3;
  for (int n : sizes) {
    if (n < min_n)
      throw ConfigError("replication_study: size " + std::to_string(n) +
                        " is below the minimum of " + std::to_string(min_n));
  }

  const Benchmark bench = make_benchmark(problem);
  const ExperimentalDesign test =
      bench.sample(n_test, derive_seed(master_seed, 0, 0, 1));

  const int n_sizes = static_cast<int>(sizes.size());
  std::vector<detail::RepOutcome> outcomes(
      static_cast<std::size_t>(n_sizes) * static_cast<std::size_t>(n_rep));

  parallel_for(n_sizes * n_rep, opts.threads, [&](int task) {
    const int si = task / n_rep;
    const int rep = task % n_rep;
    const int n = sizes[static_cast<std::size_t>(si)];
    detail::RepOutcome& out = outcomes[static_cast<std::size_t>(task)];
    TrainConfig rep_cfg = cfg;
    rep_cfg.seed = derive_seed(master_seed, static_cast<std::uint64_t>(n),
                               static_cast<std::uint64_t>(rep), 0);
    try {
      const ExperimentalDesign ed = bench.sample(n, rep_cfg.seed);
      const SparsePceModel model = train(ed, bench.space, rep_cfg);
      out.icv = model.diagnostics.q2_icv;
      out.test = q_squared_test(model, test);
      if (opts.compute_ocv) {
        const OcvReport ocv = outer_loocv(ed, bench.space, rep_cfg);
        if (!ocv.complete())
          throw NumericalError("outer CV failed on " +
                               std::to_string(ocv.failed_folds.size()) +
                               " folds");
        out.ocv = ocv.q2_ocv;
      }
      out.ok = true;
    } catch (const Error&) {
      out.ok = false;
    }
  });

  ReplicationTable table;
  table.problem = problem;
  table.ocv_included = opts.compute_ocv;
  table.rows.resize(static_cast<std::size_t>(n_sizes));
  for (int si = 0; si < n_sizes; ++si) {
    ReplicationRow& row = table.rows[static_cast<std::size_t>(si)];
    row.n = sizes[static_cast<std::size_t>(si)];
    row.n_rep = n_rep;
    std::vector<double> icv, ocv, tst;
    for (int rep = 0; rep < n_rep; ++rep) {
      const auto& out = outcomes[static_cast<std::size_t>(si * n_rep + rep)];
      if (!out.ok) continue;
      icv.push_back(out.icv);
      tst.push_back(out.test);
      if (opts.compute_ocv) ocv.push_back(out.ocv);
    }
    row.failures = n_rep - static_cast<int>(icv.size());
    detail::mean_std(icv, row.q2_icv_mean, row.q2_icv_std);
    detail::mean_std(tst, row.q2_test_mean, row.q2_test_std);
    if (opts.compute_ocv)
      detail::mean_std(ocv, row.q2_ocv_mean, row.q2_ocv_std);
  }
  return table;
}

}  // namespace pcecv

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "pcecv/errors.hpp"
#include "pcecv/multi_index.hpp"
#include "pcecv/ols.hpp"

namespace pcecv {

enum class Selector { Omp, Lars, Full };

inline const char* to_string(Selector s) {
  switch (s) {
    case Selector::Omp: return "omp";
    case Selector::Lars: return "lars";
    case Selector::Full: return "full";
  }
  return "?";
}

// One point on a selection path: the active columns (as positions into the
// candidate basis, in activation order), their OLS coefficients, and the
// per-step validation errors. The positions refer to the candidate
// multi-index list carried by the owning SelectionPath. Steps that cannot
// be scored (degenerate leverage) carry infinite errors and are never
// selected.
struct SelectionStep {
  std::vector<int> active;
  Eigen::VectorXd coefficients;
  double loo = std::numeric_limits<double>::infinity();
  double corrected_loo = std::numeric_limits<double>::infinity();
};

struct SelectionPath {
  Selector selector = Selector::Omp;
  std::vector<MultiIndex> basis;  // candidate multi-indices, column order
  std::vector<SelectionStep> steps;

  // Active set of one step as multi-indices, in activation order.
  std::vector<MultiIndex> active_indices(std::size_t step) const {
    std::vector<MultiIndex> out;
    out.reserve(steps.at(step).active.size());
    for (int pos : steps.at(step).active)
      out.push_back(basis.at(static_cast<std::size_t>(pos)));
    return out;
  }
};

namespace detail {

// Incremental thin QR over a growing active column set (modified
// Gram-Schmidt with one reorthogonalization pass). Appending a column costs
// O(N·j) and keeps the OLS residual, hat diagonal, R⁻¹ and the Gram-inverse
// trace current, so each path step is scored without refitting.
class ActiveSetQr {
 public:
  ActiveSetQr(const Eigen::MatrixXd& columns, const Eigen::VectorXd& y,
              int capacity)
      : x_(columns),
        n_(columns.rows()),
        q_(columns.rows(), capacity),
        r_(Eigen::MatrixXd::Zero(capacity, capacity)),
        r_inv_(Eigen::MatrixXd::Zero(capacity, capacity)),
        qty_(capacity),
        residual_(y),
        hat_(Eigen::VectorXd::Zero(columns.rows())),
        gram_inv_diag_(capacity) {}

  int size() const { return static_cast<int>(active_.size()); }
  const std::vector<int>& active() const { return active_; }
  const Eigen::VectorXd& residual() const { return residual_; }
  const Eigen::VectorXd& hat_diagonal() const { return hat_; }
  double gram_inverse_trace() const { return trace_; }

  // (G⁻¹)_kk for the active set, activation order.
  double gram_inverse_diagonal(int k) const { return gram_inv_diag_[k]; }

  // Orthogonalizes column c against the active set and appends it. Returns
  // false (state unchanged) when the column is numerically collinear or
  // would push the Gram condition estimate past kConditionLimit.
  bool try_append(int c) {
    const int j = size();
    const double col_norm = x_.col(c).norm();
    if (!(col_norm > 0.0) || !std::isfinite(col_norm)) return false;

    Eigen::VectorXd v = x_.col(c);
    Eigen::VectorXd h = Eigen::VectorXd::Zero(j);
    for (int pass = 0; pass < 2; ++pass) {
      for (int k = 0; k < j; ++k) {
        const double proj = q_.col(k).dot(v);
        v -= proj * q_.col(k);
        h[k] += proj;
      }
    }
    const double rho = v.norm();
    if (!(rho > kCollinearTol * col_norm)) return false;
    const double rho_max = std::max(rho_max_, rho);
    const double rho_min = std::min(rho_min_, rho);
    if ((rho_max / rho_min) * (rho_max / rho_min) > kConditionLimit) {
      return false;
    }
    rho_max_ = rho_max;
    rho_min_ = rho_min;

    q_.col(j) = v / rho;
    r_.col(j).head(j) = h;
    r_(j, j) = rho;
    // R⁻¹ grows by the column [-R⁻¹h/ρ; 1/ρ].
    if (j > 0) {
      r_inv_.col(j).head(j) =
          -(r_inv_.topLeftCorner(j, j) * h) / rho;
    }
    r_inv_(j, j) = 1.0 / rho;
    trace_ += r_inv_.col(j).head(j + 1).squaredNorm();
    for (int k = 0; k < j; ++k) {
      gram_inv_diag_[k] += r_inv_(k, j) * r_inv_(k, j);
    }
    gram_inv_diag_[j] = r_inv_(j, j) * r_inv_(j, j);

    qty_[j] = q_.col(j).dot(residual_);
    residual_ -= qty_[j] * q_.col(j);
    hat_ += q_.col(j).cwiseAbs2();
    active_.push_back(c);
    return true;
  }

  // OLS coefficients of the active columns, activation order.
  Eigen::VectorXd solve() const {
    const int j = size();
    return r_.topLeftCorner(j, j)
        .triangularView<Eigen::Upper>()
        .solve(qty_.head(j));
  }

  // Solves Rᵀ t = s on the active block.
  Eigen::VectorXd r_transpose_solve(const Eigen::VectorXd& s) const {
    const int j = size();
    return r_.topLeftCorner(j, j)
        .triangularView<Eigen::Upper>()
        .transpose()
        .solve(s);
  }

  Eigen::VectorXd q_times(const Eigen::VectorXd& t) const {
    return q_.leftCols(size()) * t;
  }

  // Analytic LOO of the current active-set OLS fit; +inf when a leverage is
  // degenerate so the step is recorded but never wins.
  double loo() const {
    const auto n = static_cast<double>(n_);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < n_; ++i) {
      if (hat_[i] >= kLeverageLimit) {
        return std::numeric_limits<double>::infinity();
      }
      const double r = residual_[i] / (1.0 - hat_[i]);
      sum += r * r;
    }
    return sum / n;
  }

 private:
  static constexpr double kCollinearTol = 1e-13;

  const Eigen::MatrixXd& x_;
  Eigen::Index n_;
  Eigen::MatrixXd q_;
  Eigen::MatrixXd r_;
  Eigen::MatrixXd r_inv_;
  Eigen::VectorXd qty_;
  Eigen::VectorXd residual_;
  Eigen::VectorXd hat_;
  Eigen::VectorXd gram_inv_diag_;
  std::vector<int> active_;
  double trace_ = 0.0;
  double rho_max_ = 0.0;
  double rho_min_ = std::numeric_limits<double>::infinity();
};

inline double corrected_from(double loo, double trace, int p, Eigen::Index n) {
  if (!std::isfinite(loo)) return loo;
  return loo / (1.0 - static_cast<double>(p) / static_cast<double>(n)) *
         (1.0 + trace);
}

inline double stop_scale(const Eigen::VectorXd& y) {
  return 1e-13 * std::max(1.0, y.norm());
}

}  // namespace detail

// Orthogonal matching pursuit: each step activates the candidate most
// correlated with the current OLS residual (raw, unnormalized columns; ties
// go to the lowest column index), then refits by OLS. Zero-norm or
// collinearity-rejected columns are dropped from candidacy. The path stops
// at p_max active columns (capped at N-1 and the column count) or when the
// residual is numerically zero.
inline SelectionPath omp_path(const Eigen::MatrixXd& psi,
                              const Eigen::VectorXd& y,
                              const std::vector<MultiIndex>& indices,
                              int p_max) {
  const Eigen::Index n = psi.rows();
  const Eigen::Index p_full = psi.cols();
  if (y.size() != n) throw ConfigError("omp_path: response length != row count");
  if (static_cast<Eigen::Index>(indices.size()) != p_full)
    throw ConfigError("omp_path: candidate index list does not match columns");
  if (p_max < 1) throw ConfigError("omp_path requires p_max >= 1");
  const int cap = static_cast<int>(
      std::min<Eigen::Index>({static_cast<Eigen::Index>(p_max), p_full, n - 1}));
  SelectionPath path{Selector::Omp, indices, {}};
  if (cap < 1) return path;

  std::vector<char> available(static_cast<std::size_t>(p_full), 1);
  detail::ActiveSetQr engine(psi, y, cap);
  const double stop = detail::stop_scale(y);

  while (engine.size() < cap) {
    const Eigen::VectorXd& r = engine.residual();
    if (r.norm() <= stop) break;
    bool appended = false;
    while (!appended) {
      int best = -1;
      double best_corr = 0.0;
      for (Eigen::Index c = 0; c < p_full; ++c) {
        if (!available[static_cast<std::size_t>(c)]) continue;
        const double corr = std::abs(psi.col(c).dot(r));
        if (corr > best_corr) {
          best_corr = corr;
          best = static_cast<int>(c);
        }
      }
      if (best < 0) break;
      available[static_cast<std::size_t>(best)] = 0;
      appended = engine.try_append(best);
    }
    if (!appended) break;

    SelectionStep step;
    step.active = engine.active();
    step.coefficients = engine.solve();
    step.loo = engine.loo();
    step.corrected_loo = detail::corrected_from(
        step.loo, engine.gram_inverse_trace(), engine.size(), n);
    path.steps.push_back(std::move(step));
  }
  return path;
}

// Least-angle regression (hybrid variant): the activation sequence follows
// the standard equiangular LARS walk on unit-normalized columns, and every
// step is scored by a plain OLS refit on the active set in the original
// column scaling. Hat diagonal and residuals are scale-invariant; only the
// Gram-inverse trace must be rescaled per column.
inline SelectionPath lars_path(const Eigen::MatrixXd& psi,
                               const Eigen::VectorXd& y,
                               const std::vector<MultiIndex>& indices,
                               int p_max) {
  const Eigen::Index n = psi.rows();
  const Eigen::Index p_full = psi.cols();
  if (y.size() != n) throw ConfigError("lars_path: response length != row count");
  if (static_cast<Eigen::Index>(indices.size()) != p_full)
    throw ConfigError("lars_path: candidate index list does not match columns");
  if (p_max < 1) throw ConfigError("lars_path requires p_max >= 1");
  const int cap = static_cast<int>(
      std::min<Eigen::Index>({static_cast<Eigen::Index>(p_max), p_full, n - 1}));
  SelectionPath path{Selector::Lars, indices, {}};
  if (cap < 1) return path;

  Eigen::VectorXd col_norm(p_full);
  Eigen::MatrixXd xn(n, p_full);
  std::vector<char> available(static_cast<std::size_t>(p_full), 0);
  for (Eigen::Index c = 0; c < p_full; ++c) {
    col_norm[c] = psi.col(c).norm();
    if (col_norm[c] > 0.0 && std::isfinite(col_norm[c])) {
      xn.col(c) = psi.col(c) / col_norm[c];
      available[static_cast<std::size_t>(c)] = 1;
    } else {
      xn.col(c).setZero();
    }
  }

  detail::ActiveSetQr engine(xn, y, cap);
  Eigen::VectorXd lars_residual = y;
  const double stop = detail::stop_scale(y);

  auto record_step = [&]() {
    SelectionStep step;
    step.active = engine.active();
    const Eigen::VectorXd beta_norm = engine.solve();
    step.coefficients.resize(beta_norm.size());
    double trace = 0.0;
    for (int k = 0; k < engine.size(); ++k) {
      const double norm_k = col_norm[step.active[static_cast<std::size_t>(k)]];
      step.coefficients[k] = beta_norm[k] / norm_k;
      trace += engine.gram_inverse_diagonal(k) / (norm_k * norm_k);
    }
    step.loo = engine.loo();
    step.corrected_loo =
        detail::corrected_from(step.loo, trace, engine.size(), n);
    path.steps.push_back(std::move(step));
  };

  // First activation: most correlated column.
  Eigen::VectorXd corr = xn.transpose() * lars_residual;
  {
    bool appended = false;
    while (!appended) {
      int best = -1;
      double best_corr = 0.0;
      for (Eigen::Index c = 0; c < p_full; ++c) {
        if (!available[static_cast<std::size_t>(c)]) continue;
        if (std::abs(corr[c]) > best_corr) {
          best_corr = std::abs(corr[c]);
          best = static_cast<int>(c);
        }
      }
      if (best < 0 || best_corr <= stop) return path;
      available[static_cast<std::size_t>(best)] = 0;
      appended = engine.try_append(best);
    }
  }
  record_step();

  while (engine.size() < cap) {
    corr = xn.transpose() * lars_residual;
    double c_max = 0.0;
    for (int idx : engine.active()) c_max = std::max(c_max, std::abs(corr[idx]));
    if (c_max <= stop) break;

    // Equiangular direction u = A_A · Q · R⁻ᵀ s with s the active
    // correlation signs; then X_Aᵀ u = A_A·s.
    const int j = engine.size();
    Eigen::VectorXd s(j);
    for (int k = 0; k < j; ++k) {
      s[k] = corr[engine.active()[static_cast<std::size_t>(k)]] >= 0.0 ? 1.0 : -1.0;
    }
    Eigen::VectorXd t = engine.r_transpose_solve(s);
    const double t_norm = t.norm();
    if (!(t_norm > 0.0) || !std::isfinite(t_norm)) break;
    const double a_a = 1.0 / t_norm;
    const Eigen::VectorXd u = engine.q_times(t) * a_a;

    // Smallest positive crossing γ over the inactive columns.
    double gamma = std::numeric_limits<double>::infinity();
    int joiner = -1;
    for (Eigen::Index c = 0; c < p_full; ++c) {
      if (!available[static_cast<std::size_t>(c)]) continue;
      const double a_c = xn.col(c).dot(u);
      for (const double g :
           {(c_max - corr[c]) / (a_a - a_c), (c_max + corr[c]) / (a_a + a_c)}) {
        if (std::isfinite(g) && g > 0.0 && g < gamma) {
          gamma = g;
          joiner = static_cast<int>(c);
        }
      }
    }
    if (joiner < 0) break;  // no candidate ever catches up; path ends
    // When the common correlation would hit zero at the crossing, the walk
    // has reached the full least-squares point and the joiner carries no
    // signal: the path ends without it.
    if (!(c_max - gamma * a_a > stop)) break;
    lars_residual -= gamma * u;

    bool appended = false;
    available[static_cast<std::size_t>(joiner)] = 0;
    appended = engine.try_append(joiner);
    while (!appended) {
      // Degenerate joiner: fall back to the next-smallest positive crossing.
      double next_gamma = std::numeric_limits<double>::infinity();
      int next_joiner = -1;
      for (Eigen::Index c = 0; c < p_full; ++c) {
        if (!available[static_cast<std::size_t>(c)]) continue;
        const double a_c = xn.col(c).dot(u);
        for (const double g : {(c_max - corr[c]) / (a_a - a_c),
                               (c_max + corr[c]) / (a_a + a_c)}) {
          if (std::isfinite(g) && g > 0.0 && g < next_gamma) {
            next_gamma = g;
            next_joiner = static_cast<int>(c);
          }
        }
      }
      if (next_joiner < 0) break;
      available[static_cast<std::size_t>(next_joiner)] = 0;
      appended = engine.try_append(next_joiner);
    }
    if (!appended) break;
    record_step();
  }
  return path;
}

}  // namespace pcecv

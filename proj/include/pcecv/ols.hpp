#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <sstream>

#include "pcecv/errors.hpp"

namespace pcecv {

// A fitted system is rejected as singular when the condition-number estimate
// of ΨᵀΨ exceeds this.
inline constexpr double kConditionLimit = 1e12;
// Leverage at or above this makes the analytic LOO residual degenerate.
inline constexpr double kLeverageLimit = 1.0 - 1e-12;

struct OlsFit {
  Eigen::VectorXd coefficients;
  Eigen::VectorXd hat_diagonal;
  double gram_inverse_trace = 0.0;
  Eigen::VectorXd residuals;
  double condition_estimate = 1.0;
};

// Least squares via column-pivoted Householder QR of Ψ (never forms ΨᵀΨ).
// The hat diagonal comes from the thin Q factor, the Gram inverse trace from
// ‖R⁻¹‖²_F; column pivoting leaves both invariant.
inline OlsFit ols_fit(const Eigen::MatrixXd& psi, const Eigen::VectorXd& y) {
  const Eigen::Index n = psi.rows();
  const Eigen::Index p = psi.cols();
  if (p < 1 || n < p) {
    std::ostringstream os;
    os << "ols_fit requires N >= P >= 1, got N=" << n << " P=" << p;
    throw ConfigError(os.str());
  }
  if (y.size() != n) throw ConfigError("ols_fit: response length != row count");

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(psi);
  const Eigen::VectorXd r_diag = qr.matrixR().diagonal().head(p).cwiseAbs();
  const double r_max = r_diag.maxCoeff();
  const double r_min = r_diag.minCoeff();
  double condition = std::numeric_limits<double>::infinity();
  if (r_min > 0.0 && std::isfinite(r_max)) {
    const double ratio = r_max / r_min;
    condition = ratio * ratio;
  }
  if (!(condition <= kConditionLimit)) {
    std::ostringstream os;
    os << "singular least-squares system: cond(gram) estimate " << condition
       << " exceeds " << kConditionLimit << " (P=" << p << ", N=" << n << ")";
    throw SingularError(os.str(), condition);
  }

  OlsFit fit;
  fit.condition_estimate = condition;
  fit.coefficients = qr.solve(y);
  fit.residuals = y - psi * fit.coefficients;

  const Eigen::MatrixXd thin_q =
      qr.householderQ() * Eigen::MatrixXd::Identity(n, p);
  fit.hat_diagonal = thin_q.rowwise().squaredNorm();

  const auto r_tri = qr.matrixR().topLeftCorner(p, p).triangularView<Eigen::Upper>();
  const Eigen::MatrixXd r_inv = r_tri.solve(Eigen::MatrixXd::Identity(p, p));
  fit.gram_inverse_trace = r_inv.squaredNorm();
  return fit;
}

// Analytic leave-one-out error (1/N)·Σ (rᵢ/(1-hᵢ))², the exact LOO residual
// identity for linear smoothers.
inline double loo_error(const OlsFit& fit, const Eigen::VectorXd& y) {
  const Eigen::Index n = y.size();
  if (fit.residuals.size() != n || fit.hat_diagonal.size() != n) {
    throw ConfigError("loo_error: fit does not match response length");
  }
  double sum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double h = fit.hat_diagonal[i];
    if (h >= kLeverageLimit) {
      std::ostringstream os;
      os << "degenerate leverage h[" << i << "] = " << h
         << ": sample is interpolated, LOO residual undefined";
      throw NumericalError(os.str());
    }
    const double r = fit.residuals[i] / (1.0 - h);
    sum += r * r;
  }
  return sum / static_cast<double>(n);
}

// Corrected inner-CV error: ε_LOO · (1 - P/N)⁻¹ · (1 + tr((ΨᵀΨ)⁻¹)).
inline double corrected_icv_error(const OlsFit& fit, const Eigen::VectorXd& y,
                                  int p) {
  const auto n = static_cast<int>(y.size());
  if (p >= n) {
    std::ostringstream os;
    os << "ICV correction undefined for P=" << p << " >= N=" << n;
    throw NumericalError(os.str());
  }
  const double loo = loo_error(fit, y);
  const double factor = 1.0 / (1.0 - static_cast<double>(p) / n) *
                        (1.0 + fit.gram_inverse_trace);
  return loo * factor;
}

}  // namespace pcecv

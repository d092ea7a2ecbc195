#pragma once

#include <boost/math/distributions/normal.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "pcecv/errors.hpp"

namespace pcecv {

enum class DistKind { Uniform, Gaussian, Lognormal };

inline const char* to_string(DistKind kind) {
  switch (kind) {
    case DistKind::Uniform: return "uniform";
    case DistKind::Gaussian: return "gaussian";
    case DistKind::Lognormal: return "lognormal";
  }
  return "?";
}

inline double normal_cdf(double z) {
  static const boost::math::normal_distribution<double> unit{};
  return boost::math::cdf(unit, z);
}

inline double normal_quantile(double p) {
  static const boost::math::normal_distribution<double> unit{};
  return boost::math::quantile(unit, p);
}

// One independent input variable. `a, b` are the lower/upper bound for
// Uniform, and the mean/standard deviation of the (underlying) normal for
// Gaussian/Lognormal. `bounds` truncates the distribution to a natural-unit
// interval; truncated normal-family marginals are standardized through the
// truncated CDF so their standardized image is exactly standard normal.
struct MarginalDistribution {
  DistKind kind = DistKind::Uniform;
  double a = 0.0;
  double b = 1.0;
  std::optional<std::pair<double, double>> bounds;
  std::string name;

  void validate(int var_index = -1) const;
};

namespace detail {

inline std::string var_label(const MarginalDistribution& m, int var_index) {
  std::ostringstream os;
  os << "variable";
  if (var_index >= 0) os << " " << var_index;
  if (!m.name.empty()) os << " (" << m.name << ")";
  return os.str();
}

// CDF bounds of the underlying normal over the truncation interval.
struct TruncatedMass {
  double f_lo;
  double f_hi;
};

inline TruncatedMass truncated_mass(const MarginalDistribution& m) {
  const auto& [lo, hi] = *m.bounds;
  double z_lo, z_hi;
  if (m.kind == DistKind::Gaussian) {
    z_lo = (lo - m.a) / m.b;
    z_hi = (hi - m.a) / m.b;
  } else {
    z_lo = (std::log(lo) - m.a) / m.b;
    z_hi = (std::log(hi) - m.a) / m.b;
  }
  return {normal_cdf(z_lo), normal_cdf(z_hi)};
}

}  // namespace detail

inline void MarginalDistribution::validate(int var_index) const {
  const std::string label = detail::var_label(*this, var_index);
  if (!std::isfinite(a) || !std::isfinite(b)) {
    throw ConfigError(label + ": non-finite distribution parameters");
  }
  if (kind == DistKind::Uniform) {
    if (!(a < b)) {
      throw ConfigError(label + ": uniform requires lower < upper");
    }
    if (bounds && !(bounds->first == a && bounds->second == b)) {
      throw ConfigError(label +
                        ": uniform bounds must equal the (lower, upper) parameters");
    }
    return;
  }
  if (!(b > 0.0)) {
    throw ConfigError(label + ": standard deviation must be positive");
  }
  if (bounds) {
    const auto& [lo, hi] = *bounds;
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
      throw ConfigError(label + ": truncation bounds must satisfy lower < upper");
    }
    if (kind == DistKind::Lognormal && !(lo > 0.0)) {
      throw ConfigError(label + ": lognormal truncation bounds must be positive");
    }
    const auto mass = detail::truncated_mass(*this);
    if (!(mass.f_hi - mass.f_lo > 0.0)) {
      throw ConfigError(label + ": truncation bounds enclose no probability mass");
    }
  }
}

// CDF of the marginal (truncation-adjusted), used by tests and by the
// standardization round trip. Returns a value in [0, 1].
inline double cdf(const MarginalDistribution& m, double value) {
  switch (m.kind) {
    case DistKind::Uniform:
      if (value <= m.a) return 0.0;
      if (value >= m.b) return 1.0;
      return (value - m.a) / (m.b - m.a);
    case DistKind::Gaussian:
    case DistKind::Lognormal: {
      if (m.kind == DistKind::Lognormal && !(value > 0.0)) return 0.0;
      const double z = m.kind == DistKind::Gaussian
                           ? (value - m.a) / m.b
                           : (std::log(value) - m.a) / m.b;
      const double f = normal_cdf(z);
      if (!m.bounds) return f;
      const auto mass = detail::truncated_mass(m);
      if (f <= mass.f_lo) return 0.0;
      if (f >= mass.f_hi) return 1.0;
      return (f - mass.f_lo) / (mass.f_hi - mass.f_lo);
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

// Isoprobabilistic map to the polynomial reference domain: uniform -> affine
// image in [-1, 1] (bounds inclusive); Gaussian/Lognormal -> standard-normal
// image, through the truncated CDF when bounds are present. Normal-family
// values must lie strictly inside the truncation interval so the image stays
// finite.
inline double to_standard(double value, const MarginalDistribution& m,
                          int var_index = -1) {
  auto domain_error = [&](const char* what) -> DataError {
    std::ostringstream os;
    os << detail::var_label(m, var_index) << ": value " << value << " " << what;
    return DataError(os.str());
  };
  if (!std::isfinite(value)) throw domain_error("is not finite");
  switch (m.kind) {
    case DistKind::Uniform: {
      if (value < m.a || value > m.b) {
        std::ostringstream os;
        os << "outside support [" << m.a << ", " << m.b << "]";
        throw domain_error(os.str().c_str());
      }
      return 2.0 * (value - m.a) / (m.b - m.a) - 1.0;
    }
    case DistKind::Gaussian:
    case DistKind::Lognormal: {
      if (m.kind == DistKind::Lognormal && !(value > 0.0)) {
        throw domain_error("outside lognormal support (0, inf)");
      }
      const double z = m.kind == DistKind::Gaussian
                           ? (value - m.a) / m.b
                           : (std::log(value) - m.a) / m.b;
      if (!m.bounds) return z;
      const auto mass = detail::truncated_mass(m);
      const double f = normal_cdf(z);
      const double f_trunc = (f - mass.f_lo) / (mass.f_hi - mass.f_lo);
      if (!(f_trunc > 0.0) || !(f_trunc < 1.0)) {
        std::ostringstream os;
        os << "outside truncation interval (" << m.bounds->first << ", "
           << m.bounds->second << ")";
        throw domain_error(os.str().c_str());
      }
      return normal_quantile(f_trunc);
    }
  }
  throw domain_error("has unknown distribution kind");
}

// Inverse CDF of the marginal (truncation-adjusted) for u strictly in (0,1).
inline double from_unit(double u, const MarginalDistribution& m,
                        int var_index = -1) {
  if (!(u > 0.0) || !(u < 1.0)) {
    std::ostringstream os;
    os << detail::var_label(m, var_index) << ": unit sample " << u
       << " outside (0, 1)";
    throw DataError(os.str());
  }
  switch (m.kind) {
    case DistKind::Uniform:
      return m.a + u * (m.b - m.a);
    case DistKind::Gaussian:
    case DistKind::Lognormal: {
      double p = u;
      if (m.bounds) {
        const auto mass = detail::truncated_mass(m);
        p = mass.f_lo + u * (mass.f_hi - mass.f_lo);
      }
      const double z = normal_quantile(p);
      return m.kind == DistKind::Gaussian ? m.a + m.b * z
                                          : std::exp(m.a + m.b * z);
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

// Ordered list of mutually independent marginals.
struct InputSpace {
  std::vector<MarginalDistribution> marginals;

  int dimension() const { return static_cast<int>(marginals.size()); }

  void validate() const {
    if (marginals.empty()) {
      throw ConfigError("input space must have at least one variable");
    }
    for (int j = 0; j < dimension(); ++j) marginals[j].validate(j);
  }
};

// Maps natural-unit samples (rows) to the standardized domain column by
// column. Domain errors carry the offending row and variable.
inline Eigen::MatrixXd to_standard_matrix(const Eigen::MatrixXd& natural,
                                          const InputSpace& space) {
  if (natural.cols() != space.dimension()) {
    std::ostringstream os;
    os << "sample matrix has " << natural.cols() << " columns, input space has "
       << space.dimension();
    throw DataError(os.str());
  }
  Eigen::MatrixXd out(natural.rows(), natural.cols());
  for (int j = 0; j < natural.cols(); ++j) {
    const auto& m = space.marginals[static_cast<std::size_t>(j)];
    for (Eigen::Index i = 0; i < natural.rows(); ++i) {
      try {
        out(i, j) = to_standard(natural(i, j), m, j);
      } catch (const DataError& e) {
        std::ostringstream os;
        os << "row " << i << ", " << e.what();
        throw DataError(os.str());
      }
    }
  }
  return out;
}

}  // namespace pcecv

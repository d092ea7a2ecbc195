#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "pcecv/errors.hpp"

namespace pcecv {

enum class PolyFamily { Legendre, Hermite };

inline const char* to_string(PolyFamily family) {
  return family == PolyFamily::Legendre ? "legendre" : "hermite";
}

namespace detail {

inline constexpr double kLegendreDomainTol = 1e-12;

// Orthonormal Legendre ladder on [-1,1] with uniform probability weight:
// p̃₀ = 1, p̃₁ = √3·x, x·p̃_k = a_{k+1}·p̃_{k+1} + a_k·p̃_{k-1},
// a_k = k/√(4k²-1).
inline void legendre_ladder(int k_max, double x, double* out) {
  out[0] = 1.0;
  if (k_max == 0) return;
  out[1] = std::sqrt(3.0) * x;
  double a_prev = 1.0 / std::sqrt(3.0);
  for (int k = 1; k < k_max; ++k) {
    const double kk = static_cast<double>(k + 1);
    const double a_next = kk / std::sqrt(4.0 * kk * kk - 1.0);
    out[k + 1] = (x * out[k] - a_prev * out[k - 1]) / a_next;
    a_prev = a_next;
  }
}

// Orthonormal probabilists' Hermite ladder with standard-normal weight:
// h₀ = 1, h₁ = x, h_{k+1} = (x·h_k - √k·h_{k-1}) / √(k+1).
inline void hermite_ladder(int k_max, double x, double* out) {
  out[0] = 1.0;
  if (k_max == 0) return;
  out[1] = x;
  for (int k = 1; k < k_max; ++k) {
    out[k + 1] = (x * out[k] - std::sqrt(static_cast<double>(k)) * out[k - 1]) /
                 std::sqrt(static_cast<double>(k + 1));
  }
}

}  // namespace detail

// Evaluates all orthonormal polynomial values of degree 0..k_max at x into
// `out` (length k_max + 1). Legendre arguments must lie in [-1, 1] (a 1e-12
// tolerance absorbs standardization round-off).
inline void eval_univariate_all(PolyFamily family, int k_max, double x,
                                double* out) {
  if (k_max < 0) throw ConfigError("polynomial degree must be non-negative");
  if (family == PolyFamily::Legendre) {
    if (std::abs(x) > 1.0 + detail::kLegendreDomainTol || !std::isfinite(x)) {
      std::ostringstream os;
      os << "legendre argument " << x << " outside [-1, 1]";
      throw DataError(os.str());
    }
    detail::legendre_ladder(k_max, std::clamp(x, -1.0, 1.0), out);
  } else {
    if (!std::isfinite(x)) throw DataError("hermite argument is not finite");
    detail::hermite_ladder(k_max, x, out);
  }
}

// Degree-k orthonormal polynomial value at x.
inline double eval_univariate(PolyFamily family, int k, double x) {
  std::vector<double> ladder(static_cast<std::size_t>(k) + 1);
  eval_univariate_all(family, k, x, ladder.data());
  return ladder[static_cast<std::size_t>(k)];
}

}  // namespace pcecv

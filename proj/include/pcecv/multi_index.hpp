#pragma once

#include <cstdint>
#include <numeric>
#include <sstream>
#include <vector>

#include "pcecv/errors.hpp"

namespace pcecv {

// Degrees (α₁,…,α_d), one entry per input dimension.
struct MultiIndex {
  std::vector<int> degrees;

  int total() const { return std::accumulate(degrees.begin(), degrees.end(), 0); }
  int dimension() const { return static_cast<int>(degrees.size()); }

  bool operator==(const MultiIndex&) const = default;
};

// Canonical basis order: ascending total degree, ties broken by ascending
// lexicographic comparison of the reversed degree vector. For d=2 this yields
// (0,0), (1,0), (0,1), (2,0), (1,1), (0,2), ...
inline bool canonical_less(const MultiIndex& a, const MultiIndex& b) {
  const int ta = a.total();
  const int tb = b.total();
  if (ta != tb) return ta < tb;
  for (int pos = a.dimension() - 1; pos >= 0; --pos) {
    const auto i = static_cast<std::size_t>(pos);
    if (a.degrees[i] != b.degrees[i]) return a.degrees[i] < b.degrees[i];
  }
  return false;
}

// C(p+d, d), the size of the total-degree truncation set.
inline std::uint64_t total_degree_cardinality(int d, int p) {
  if (d < 1 || p < 0) {
    throw ConfigError("total_degree_cardinality requires d >= 1, p >= 0");
  }
  std::uint64_t c = 1;
  for (int i = 1; i <= d; ++i) {
    // c * (p + i) is exactly divisible by i at every step.
    const unsigned __int128 numerator =
        static_cast<unsigned __int128>(c) * static_cast<std::uint64_t>(p + i);
    const unsigned __int128 next = numerator / static_cast<std::uint64_t>(i);
    if (next > UINT64_MAX) {
      std::ostringstream os;
      os << "basis cardinality C(" << p + d << ", " << d
         << ") overflows a 64-bit count";
      throw ConfigError(os.str());
    }
    c = static_cast<std::uint64_t>(next);
  }
  return c;
}

namespace detail {

inline void enumerate_exact_degree(int pos, int remaining, MultiIndex& current,
                                   std::vector<MultiIndex>& out) {
  if (pos == 0) {
    current.degrees[0] = remaining;
    out.push_back(current);
    return;
  }
  for (int k = 0; k <= remaining; ++k) {
    current.degrees[static_cast<std::size_t>(pos)] = k;
    enumerate_exact_degree(pos - 1, remaining - k, current, out);
  }
}

}  // namespace detail

// All α with Σαᵢ ≤ p, in canonical order; the first element is the zero index.
inline std::vector<MultiIndex> enumerate_total_degree(int d, int p) {
  const std::uint64_t count = total_degree_cardinality(d, p);
  constexpr std::uint64_t kMaxEnumerable = 20'000'000;
  if (count > kMaxEnumerable) {
    std::ostringstream os;
    os << "basis of " << count << " indices is too large to enumerate (cap "
       << kMaxEnumerable << ")";
    throw ConfigError(os.str());
  }
  std::vector<MultiIndex> out;
  out.reserve(static_cast<std::size_t>(count));
  MultiIndex current;
  current.degrees.assign(static_cast<std::size_t>(d), 0);
  for (int t = 0; t <= p; ++t) {
    detail::enumerate_exact_degree(d - 1, t, current, out);
  }
  return out;
}

}  // namespace pcecv

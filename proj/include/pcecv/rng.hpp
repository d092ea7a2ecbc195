#pragma once

#include <cstdint>
#include <random>

namespace pcecv {

// Generator identity recorded in output files alongside the seed.
inline constexpr const char* kGeneratorId = "mt19937_64";

// splitmix64 step (Steele, Lea, Flood 2014). Used only to derive independent
// stream seeds from a master seed; the streams themselves are mt19937_64.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic seed for a sub-stream identified by up to three labels,
// e.g. (master, design_size, replication). Chaining splitmix64 keeps nearby
// labels decorrelated.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a = 0,
                                 std::uint64_t b = 0, std::uint64_t c = 0) {
  std::uint64_t s = master;
  std::uint64_t h = splitmix64(s);
  s ^= a;
  h ^= splitmix64(s);
  s ^= b;
  h ^= splitmix64(s);
  s ^= c;
  h ^= splitmix64(s);
  return h;
}

// mt19937_64 wrapper with a pinned u64 -> (0,1) mapping so that streams are
// reproducible across platforms (std::uniform_real_distribution is
// implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform draw strictly inside (0,1): midpoint of a 2^-53 lattice cell.
  double unit() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1p-53;
  }

  // Unbiased integer in [0, n) by rejection sampling.
  std::uint64_t bounded(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace pcecv

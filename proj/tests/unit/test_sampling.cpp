#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <vector>

#include "pcecv/sampling.hpp"

using namespace pcecv;

namespace {

InputSpace unit_interval() {
  return {{{DistKind::Uniform, 0.0, 1.0, std::nullopt, "u"}}};
}

// x^s..θ^p sampling ranges of the room scenario (walls, source, person).
InputSpace room_ranges() {
  return {{
      {DistKind::Uniform, 0.3, 3.7, std::nullopt, "xs"},
      {DistKind::Uniform, 0.3, 2.7, std::nullopt, "ys"},
      {DistKind::Uniform, 0.25, 2.0, std::nullopt, "zs"},
      {DistKind::Uniform, 0.05, 3.95, std::nullopt, "xp"},
      {DistKind::Uniform, 0.05, 2.95, std::nullopt, "yp"},
      {DistKind::Uniform, 0.0, 360.0, std::nullopt, "thetap"},
  }};
}

InputSpace mixed_space() {
  return {{
      {DistKind::Uniform, -1.0, 3.0, std::nullopt, ""},
      {DistKind::Gaussian, 0.10, 0.0161812, std::pair{0.05, 0.15}, ""},
      {DistKind::Lognormal, 7.71, 1.0056, std::nullopt, ""},
  }};
}

// Stratum index recovered through the marginal CDF; strata are the
// equal-probability intervals [s/n, (s+1)/n).
int stratum_of(double value, const MarginalDistribution& m, int n) {
  const double u = cdf(m, value);
  for (int s = 0; s < n; ++s) {
    if (u > static_cast<double>(s) / n && u < static_cast<double>(s + 1) / n) {
      return s;
    }
  }
  return -1;
}

}  // namespace

TEST_CASE("lhs_sample places one point per stratum") {
  const auto sample = lhs_sample(4, unit_interval(), 42);
  std::vector<double> xs(sample.natural.col(0).begin(), sample.natural.col(0).end());
  std::sort(xs.begin(), xs.end());
  REQUIRE(xs.size() == 4);
  CHECK((xs[0] > 0.00 && xs[0] < 0.25));
  CHECK((xs[1] >= 0.25 && xs[1] < 0.50));
  CHECK((xs[2] >= 0.50 && xs[2] < 0.75));
  CHECK((xs[3] >= 0.75 && xs[3] <= 1.00));
}

TEST_CASE("lhs_sample is deterministic in the seed") {
  const auto a = lhs_sample(16, mixed_space(), 1234);
  const auto b = lhs_sample(16, mixed_space(), 1234);
  const auto c = lhs_sample(16, mixed_space(), 1235);
  CHECK(a.natural == b.natural);
  CHECK(a.standardized == b.standardized);
  CHECK(a.natural != c.natural);
}

TEST_CASE("lhs_sample over the room ranges stays within bounds") {
  const auto space = room_ranges();
  const auto sample = lhs_sample(350, space, 7);
  REQUIRE(sample.natural.rows() == 350);
  REQUIRE(sample.natural.cols() == 6);
  for (int j = 0; j < 6; ++j) {
    const auto& m = space.marginals[static_cast<std::size_t>(j)];
    CHECK(sample.natural.col(j).minCoeff() >= m.a);
    CHECK(sample.natural.col(j).maxCoeff() <= m.b);
    CHECK(sample.standardized.col(j).minCoeff() >= -1.0);
    CHECK(sample.standardized.col(j).maxCoeff() <= 1.0);
  }
}

TEST_CASE("lhs_sample stratification is exact for every dimension and seed") {
  const auto space = mixed_space();
  for (std::uint64_t seed : {0ULL, 1ULL, 99991ULL, 0xdeadbeefULL}) {
    for (int n : {1, 2, 7, 64}) {
      const auto sample = lhs_sample(n, space, seed);
      for (int j = 0; j < space.dimension(); ++j) {
        std::vector<int> counts(static_cast<std::size_t>(n), 0);
        for (int i = 0; i < n; ++i) {
          const int s = stratum_of(sample.natural(i, j),
                                   space.marginals[static_cast<std::size_t>(j)], n);
          REQUIRE(s >= 0);
          ++counts[static_cast<std::size_t>(s)];
        }
        CHECK(std::all_of(counts.begin(), counts.end(),
                          [](int c) { return c == 1; }));
      }
    }
  }
}

TEST_CASE("lhs_sample pairs standardized and natural coordinates consistently") {
  const auto space = mixed_space();
  const auto sample = lhs_sample(25, space, 5150);
  const Eigen::MatrixXd z = to_standard_matrix(sample.natural, space);
  CHECK(sample.standardized == z);
}

TEST_CASE("lhs_sample rejects non-positive n") {
  CHECK_THROWS_AS(lhs_sample(0, unit_interval(), 1), ConfigError);
}

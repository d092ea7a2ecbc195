#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "pcecv/basis.hpp"
#include "pcecv/sampling.hpp"

using namespace pcecv;

namespace {

InputSpace uniform_gaussian_space() {
  return {{
      {DistKind::Uniform, -1.0, 1.0, std::nullopt, ""},
      {DistKind::Gaussian, 0.0, 1.0, std::nullopt, ""},
  }};
}

}  // namespace

TEST_CASE("family_for maps marginals to polynomial families") {
  CHECK(family_for({DistKind::Uniform, 0.0, 1.0, std::nullopt, ""}) ==
        PolyFamily::Legendre);
  CHECK(family_for({DistKind::Gaussian, 0.0, 1.0, std::nullopt, ""}) ==
        PolyFamily::Hermite);
  CHECK(family_for({DistKind::Lognormal, 0.0, 1.0, std::nullopt, ""}) ==
        PolyFamily::Hermite);
}

TEST_CASE("design_matrix zero index column is all ones") {
  const auto space = uniform_gaussian_space();
  BasisSpec spec{families_for(space), enumerate_total_degree(2, 3)};
  const auto sample = lhs_sample(40, space, 11);
  const Eigen::MatrixXd psi = design_matrix(sample.standardized, spec);
  REQUIRE(psi.rows() == 40);
  REQUIRE(psi.cols() == 10);
  CHECK((psi.col(0).array() == 1.0).all());
}

TEST_CASE("design_matrix evaluates tensor products at a point") {
  BasisSpec spec{{PolyFamily::Legendre, PolyFamily::Legendre},
                 {MultiIndex{{2, 0}}, MultiIndex{{1, 1}}, MultiIndex{{2, 2}}}};
  Eigen::MatrixXd x(1, 2);
  x << 0.0, 0.5;
  const Eigen::MatrixXd psi = design_matrix(x, spec);
  // Orthonormal Legendre: p̃₂(0) = -√5/2, p̃₁(0.5) = √3/2, p̃₂(0.5) = -√5/8.
  CHECK(psi(0, 0) == Catch::Approx(-std::sqrt(5.0) / 2.0).epsilon(1e-14));
  CHECK(psi(0, 1) == Catch::Approx(0.0).margin(1e-15));
  CHECK(psi(0, 2) ==
        Catch::Approx((-std::sqrt(5.0) / 2.0) * (-std::sqrt(5.0) / 8.0))
            .epsilon(1e-13));
}

TEST_CASE("empirical gram of an LHS design approaches identity") {
  const auto space = uniform_gaussian_space();
  BasisSpec spec{families_for(space), enumerate_total_degree(2, 3)};
  const int n = 20000;
  const auto sample = lhs_sample(n, space, 2024);
  const Eigen::MatrixXd psi = design_matrix(sample.standardized, spec);
  // Five standard errors of each Ψ_j·Ψ_k product mean, so the tolerance is
  // O(N^{-1/2}) with the right per-pair constant.
  for (int j = 0; j < psi.cols(); ++j) {
    for (int k = 0; k < psi.cols(); ++k) {
      const Eigen::ArrayXd product =
          psi.col(j).array() * psi.col(k).array();
      const double mean = product.mean();
      const double sd = std::sqrt((product - mean).square().mean());
      const double tol = 5.0 * sd / std::sqrt(static_cast<double>(n)) + 1e-12;
      CAPTURE(j, k);
      CHECK(mean == Catch::Approx(j == k ? 1.0 : 0.0).margin(tol));
    }
  }
}

TEST_CASE("design_matrix is permutation-equivariant in rows") {
  const auto space = uniform_gaussian_space();
  BasisSpec spec{families_for(space), enumerate_total_degree(2, 4)};
  const auto sample = lhs_sample(12, space, 3);
  const Eigen::MatrixXd psi = design_matrix(sample.standardized, spec);
  Eigen::PermutationMatrix<Eigen::Dynamic> perm(12);
  perm.setIdentity();
  std::swap(perm.indices()[0], perm.indices()[7]);
  std::swap(perm.indices()[3], perm.indices()[11]);
  const Eigen::MatrixXd shuffled = perm * sample.standardized;
  const Eigen::MatrixXd psi_shuffled = design_matrix(shuffled, spec);
  CHECK((perm * psi - psi_shuffled).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("design_matrix reports the offending row and variable") {
  using Catch::Matchers::ContainsSubstring;
  BasisSpec spec{{PolyFamily::Legendre}, {MultiIndex{{1}}}};
  Eigen::MatrixXd x(3, 1);
  x << 0.0, 2.0, 0.5;
  CHECK_THROWS_WITH(design_matrix(x, spec),
                    ContainsSubstring("row 1") && ContainsSubstring("variable 0"));
}

TEST_CASE("design_matrix validates shapes") {
  BasisSpec spec{{PolyFamily::Legendre}, {MultiIndex{{0}}}};
  Eigen::MatrixXd x(2, 2);
  x.setZero();
  CHECK_THROWS_AS(design_matrix(x, spec), DataError);
  BasisSpec mismatched{{PolyFamily::Legendre, PolyFamily::Hermite},
                       {MultiIndex{{1}}}};
  Eigen::MatrixXd x2(2, 2);
  x2.setZero();
  CHECK_THROWS_AS(design_matrix(x2, mismatched), ConfigError);
  BasisSpec empty{{PolyFamily::Legendre}, {}};
  Eigen::MatrixXd x3(2, 1);
  x3.setZero();
  CHECK_THROWS_AS(design_matrix(x3, empty), ConfigError);
}

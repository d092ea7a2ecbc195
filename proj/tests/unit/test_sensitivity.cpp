#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <vector>

#include "pcecv/rng.hpp"
#include "pcecv/sensitivity.hpp"
#include "pcecv/training.hpp"

using namespace pcecv;

namespace {

// Builds a model directly from (index, coefficient) pairs over a uniform
// cube, bypassing training.
SparsePceModel manual_model(int d,
                            const std::vector<std::pair<MultiIndex, double>>&
                                terms) {
  SparsePceModel model;
  for (int j = 0; j < d; ++j) {
    model.input_space.marginals.push_back(
        {DistKind::Uniform, -1.0, 1.0, std::nullopt, "x" + std::to_string(j)});
    model.spec.families.push_back(PolyFamily::Legendre);
  }
  model.coefficients.resize(static_cast<Eigen::Index>(terms.size()));
  for (std::size_t k = 0; k < terms.size(); ++k) {
    model.spec.indices.push_back(terms[k].first);
    model.coefficients[static_cast<Eigen::Index>(k)] = terms[k].second;
  }
  return model;
}

}  // namespace

TEST_CASE("moments of simple expansions") {
  const auto constant = manual_model(2, {{MultiIndex{{0, 0}}, 3.5}});
  const auto [m0, v0] = pce_moments(constant);
  CHECK(m0 == 3.5);
  CHECK(v0 == 0.0);

  const auto model = manual_model(2, {{MultiIndex{{0, 0}}, 1.0},
                                      {MultiIndex{{1, 0}}, 2.0},
                                      {MultiIndex{{0, 2}}, 3.0}});
  const auto [mean, variance] = pce_moments(model);
  CHECK(mean == 1.0);
  CHECK(variance == 13.0);

  // A model without a constant term has zero mean.
  const auto no_const = manual_model(2, {{MultiIndex{{1, 0}}, 2.0}});
  CHECK(pce_moments(no_const).first == 0.0);
}

TEST_CASE("additive models have first order equal to total") {
  const auto model = manual_model(2, {{MultiIndex{{0, 0}}, 5.0},
                                      {MultiIndex{{1, 0}}, 3.0},
                                      {MultiIndex{{2, 0}}, 1.0},
                                      {MultiIndex{{0, 1}}, 2.0}});
  const auto s = sobol_indices(model);
  CHECK(s.variance == 14.0);  // 9 + 1 + 4
  CHECK(s.first_order[0] == s.total[0]);
  CHECK(s.first_order[1] == s.total[1]);
  CHECK(s.total[0] == Catch::Approx(10.0 / 14.0).epsilon(1e-15));
  CHECK(s.total[1] == Catch::Approx(4.0 / 14.0).epsilon(1e-15));
  CHECK(s.total.sum() == Catch::Approx(1.0).epsilon(1e-14));
  CHECK(s.second_order.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("a pure interaction term is all second order") {
  const auto model = manual_model(2, {{MultiIndex{{1, 1}}, 1.0}});
  const auto s = sobol_indices(model);
  CHECK(s.total[0] == 1.0);
  CHECK(s.total[1] == 1.0);
  CHECK(s.first_order[0] == 0.0);
  CHECK(s.first_order[1] == 0.0);
  CHECK(s.second_order(0, 1) == 1.0);
  CHECK(s.second_order(1, 0) == 1.0);
  CHECK(s.mean == 0.0);
}

TEST_CASE("first and second order shares partition the variance") {
  // No index activates three variables, so first- plus second-order shares
  // must account for the whole variance.
  const auto model = manual_model(3, {{MultiIndex{{0, 0, 0}}, 2.0},
                                      {MultiIndex{{1, 0, 0}}, 1.0},
                                      {MultiIndex{{0, 2, 0}}, 0.5},
                                      {MultiIndex{{1, 1, 0}}, 0.25},
                                      {MultiIndex{{0, 1, 2}}, 0.75}});
  const auto s = sobol_indices(model);
  double sum = s.first_order.sum();
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) sum += s.second_order(i, j);
  CHECK(sum == Catch::Approx(1.0).epsilon(1e-14));

  // Adding a three-way term breaks the two-way partition but not the
  // total-index accounting.
  auto with_three = manual_model(3, {{MultiIndex{{1, 0, 0}}, 1.0},
                                     {MultiIndex{{1, 1, 1}}, 1.0}});
  const auto s3 = sobol_indices(with_three);
  double sum3 = s3.first_order.sum();
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) sum3 += s3.second_order(i, j);
  CHECK(sum3 < 1.0);
  CHECK(s3.total.sum() > 1.0);
  CHECK(s3.total[0] == 1.0);  // both terms involve x0
}

TEST_CASE("indices stay within bounds and respect the order hierarchy") {
  Rng rng(404);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::pair<MultiIndex, double>> terms;
    const auto all = enumerate_total_degree(3, 3);
    for (const auto& idx : all) {
      if (rng.unit() < 0.4)
        terms.emplace_back(idx, normal_quantile(rng.unit()));
    }
    terms.emplace_back(MultiIndex{{1, 0, 0}}, 1.0);  // guarantee variance
    const auto s = sobol_indices(manual_model(3, terms));
    for (int i = 0; i < 3; ++i) {
      CHECK(s.first_order[i] >= 0.0);
      CHECK(s.first_order[i] <= s.total[i] + 1e-15);
      CHECK(s.total[i] <= 1.0 + 1e-12);
    }
    CHECK(s.first_order.sum() <= 1.0 + 1e-12);
    CHECK(s.second_order == s.second_order.transpose());
  }
}

TEST_CASE("sobol indices are invariant under coefficient scaling") {
  const auto base = manual_model(2, {{MultiIndex{{0, 0}}, 1.0},
                                     {MultiIndex{{2, 0}}, 0.8},
                                     {MultiIndex{{0, 1}}, 0.5},
                                     {MultiIndex{{1, 1}}, 0.3}});
  auto scaled = base;
  scaled.coefficients *= -2.0;  // exact power-of-two scaling
  const auto a = sobol_indices(base);
  const auto b = sobol_indices(scaled);
  CHECK(a.total == b.total);
  CHECK(a.first_order == b.first_order);
  CHECK(a.second_order == b.second_order);
  CHECK(b.variance == 4.0 * a.variance);
}

TEST_CASE("zero-variance expansions have no sensitivity") {
  const auto constant = manual_model(2, {{MultiIndex{{0, 0}}, 3.5}});
  CHECK_THROWS_AS(sobol_indices(constant), NumericalError);
}

TEST_CASE("coefficient-based totals match a sampling estimator") {
  // Jansen's total-index estimator applied to the surrogate as a black box
  // must agree with the coefficient formula up to Monte Carlo noise.
  const auto model = manual_model(2, {{MultiIndex{{0, 0}}, 1.0},
                                      {MultiIndex{{2, 0}}, 0.8},
                                      {MultiIndex{{0, 1}}, 0.5},
                                      {MultiIndex{{1, 1}}, 0.3}});
  const auto s = sobol_indices(model);

  const int n = 20000;
  Rng rng(2718);
  Eigen::MatrixXd a(n, 2), b(n, 2);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < 2; ++j) {
      a(i, j) = 2.0 * rng.unit() - 1.0;
      b(i, j) = 2.0 * rng.unit() - 1.0;
    }
  }
  const Eigen::VectorXd fa = predict(model, a);
  const double var_emp = population_variance(fa);
  for (int j = 0; j < 2; ++j) {
    Eigen::MatrixXd mixed = a;
    mixed.col(j) = b.col(j);
    const Eigen::VectorXd fm = predict(model, mixed);
    const double total_mc =
        (fa - fm).squaredNorm() / (2.0 * n * var_emp);
    CHECK(total_mc == Catch::Approx(s.total[j]).margin(0.05));
  }
}

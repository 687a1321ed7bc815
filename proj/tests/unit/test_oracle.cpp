#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <random>
#include <vector>

#include "harness.hpp"
#include "lomv/error.hpp"
#include "lomv/oracle.hpp"
#include "lomv/solver.hpp"

namespace lomv {
namespace {

TEST(Oracle, SingleAsset) {
  Eigen::MatrixXd m(1, 1);
  m << 2.5;
  const OracleResult r = oracle_solve(DenseCovariance(m));
  EXPECT_EQ(r.weights, (std::vector<double>{1.0}));
  EXPECT_DOUBLE_EQ(r.variance, 2.5);
  EXPECT_EQ(r.candidates_examined, 1u);
}

TEST(Oracle, DiagonalTwoByTwo) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2, 2);
  m(0, 0) = 1.0;
  m(1, 1) = 3.0;
  const OracleResult r = oracle_solve(DenseCovariance(m));
  EXPECT_NEAR(r.weights[0], 0.75, 1e-15);
  EXPECT_NEAR(r.weights[1], 0.25, 1e-15);
  EXPECT_NEAR(r.variance, 0.75, 1e-15);
  EXPECT_EQ(r.candidates_examined, 3u);
}

TEST(Oracle, ThreeAssetFactorExample) {
  const FactorModel f(1.0, {1.0, 2.0, 3.0}, {1.0, 1.0, 1.0});
  const OracleResult r = oracle_solve(DenseCovariance::from_factor_model(f));
  EXPECT_EQ(r.active_set, (std::vector<std::size_t>{0}));
  EXPECT_NEAR(r.weights[0], 1.0, 1e-15);
  EXPECT_EQ(r.weights[1], 0.0);
  EXPECT_EQ(r.weights[2], 0.0);
  EXPECT_EQ(r.candidates_examined, 7u);
}

TEST(Oracle, RejectsOverCapAndBadMatrices) {
  const Eigen::MatrixXd big = Eigen::MatrixXd::Identity(16, 16);
  EXPECT_THROW((void)oracle_solve(DenseCovariance(big)), InputError);
  Eigen::MatrixXd asym(2, 2);
  asym << 1, 0.5, 0.2, 1;
  EXPECT_THROW(DenseCovariance{asym}, InputError);
  Eigen::MatrixXd indef(2, 2);
  indef << 1, 2, 2, 1;
  EXPECT_THROW(DenseCovariance{indef}, InputError);
}

TEST(RestrictedWeights, FullDiagonalIsInverseVariance) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(3, 3);
  m.diagonal() << 1.0, 2.0, 4.0;
  const std::vector<std::size_t> all{0, 1, 2};
  const auto w = oracle_restricted_weights(DenseCovariance(m), all);
  ASSERT_TRUE(w.has_value());
  EXPECT_NEAR((*w)[0], 4.0 / 7.0, 1e-15);
  EXPECT_NEAR((*w)[1], 2.0 / 7.0, 1e-15);
  EXPECT_NEAR((*w)[2], 1.0 / 7.0, 1e-15);
}

TEST(RestrictedWeights, SingletonIsCorner) {
  const FactorModel f(1.0, {1.0, 2.0, 3.0}, {1.0, 1.0, 1.0});
  const std::vector<std::size_t> one{0};
  const auto w =
      oracle_restricted_weights(DenseCovariance::from_factor_model(f), one);
  ASSERT_TRUE(w.has_value());
  EXPECT_EQ(*w, (std::vector<double>{1.0, 0.0, 0.0}));
}

TEST(RestrictedWeights, NegativeEntryIsInfeasible) {
  const FactorModel f(1.0, {1.0, 2.0}, {0.01, 0.01});
  const std::vector<std::size_t> both{0, 1};
  EXPECT_FALSE(
      oracle_restricted_weights(DenseCovariance::from_factor_model(f), both)
          .has_value());
}

TEST(RestrictedWeights, RejectsBadSubsets) {
  const DenseCovariance c(Eigen::MatrixXd::Identity(2, 2));
  const std::vector<std::size_t> empty;
  const std::vector<std::size_t> out_of_range{2};
  EXPECT_THROW((void)oracle_restricted_weights(c, empty), InputError);
  EXPECT_THROW((void)oracle_restricted_weights(c, out_of_range), InputError);
}

TEST(Oracle, WinnerPassesKkt) {
  std::mt19937_64 rng(41);
  for (int t = 0; t < 100; ++t) {
    const FactorModel f = harness::random_oracle_instance(rng, 10);
    const OracleResult r = oracle_solve(DenseCovariance::from_factor_model(f));
    EXPECT_TRUE(verify_kkt(f, r.weights, 1e-8).passed) << "trial " << t;
  }
}

TEST(Oracle, AddingAnAssetNeverIncreasesVariance) {
  std::mt19937_64 rng(43);
  for (int t = 0; t < 100; ++t) {
    const FactorModel f = harness::random_oracle_instance(rng, 9);
    const FactorModel g = harness::random_oracle_instance(rng, 1);
    std::vector<double> b(f.betas().begin(), f.betas().end());
    std::vector<double> d(f.delta2s().begin(), f.delta2s().end());
    b.push_back(g.beta(0));
    d.push_back(g.delta2(0));
    const FactorModel bigger(f.sigma2(), b, d);
    const double v0 =
        oracle_solve(DenseCovariance::from_factor_model(f)).variance;
    const double v1 =
        oracle_solve(DenseCovariance::from_factor_model(bigger)).variance;
    EXPECT_LE(v1, v0 * (1.0 + 1e-12));
  }
}

TEST(Oracle, AgreesWithSolver) {
  std::mt19937_64 rng(47);
  for (int t = 0; t < 200; ++t) {
    const FactorModel f = harness::random_oracle_instance(rng, 12);
    const LomvSolution s = solve_lomv(f);
    const OracleResult r = oracle_solve(DenseCovariance::from_factor_model(f));
    ASSERT_EQ(s.active_original_indices, r.active_set);
    for (std::size_t i = 0; i < f.size(); ++i) {
      EXPECT_NEAR(s.weights[i], r.weights[i], 1e-9);
    }
    EXPECT_NEAR(s.variance, r.variance, 1e-12 * r.variance);
  }
}

}  // namespace
}  // namespace lomv

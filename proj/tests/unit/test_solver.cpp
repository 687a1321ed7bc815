#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "lomv/error.hpp"
#include "lomv/oracle.hpp"
#include "lomv/solver.hpp"

namespace lomv {
namespace {

const FactorModel kThree(1.0, {1.0, 2.0, 3.0}, {1.0, 1.0, 1.0});

FactorModel random_model(std::mt19937_64& rng, std::size_t p, double shift) {
  std::normal_distribution<double> g(shift, 1.0);
  std::uniform_real_distribution<double> d(0.05, 3.0);
  std::vector<double> b(p), d2(p);
  for (std::size_t i = 0; i < p; ++i) {
    b[i] = g(rng);
    d2[i] = d(rng);
  }
  return FactorModel(1.0, b, d2);
}

TEST(RSequence, ThreeAssetExample) {
  const RSequence r = compute_r_sequence(canonicalize(kThree));
  EXPECT_EQ(r.values, (std::vector<double>{1.0, 0.0, -3.0}));
  EXPECT_EQ(r.active_count(), 1u);
  EXPECT_TRUE(satisfies_r_invariants(r));
}

TEST(RSequence, IdenticalBetasAllPositive) {
  const FactorModel m(2.0, {0.7, 0.7, 0.7, 0.7}, {1.0, 2.0, 0.5, 3.0});
  const RSequence r = compute_r_sequence(canonicalize(m));
  for (double v : r.values) {
    EXPECT_EQ(v, 0.5);
  }
  EXPECT_EQ(r.active_count(), 4u);
}

TEST(RSequence, SingleAsset) {
  const RSequence r =
      compute_r_sequence(canonicalize(FactorModel(4.0, {1.3}, {2.0})));
  EXPECT_EQ(r.values, (std::vector<double>{0.25}));
  EXPECT_EQ(r.active_count(), 1u);
}

TEST(RSequence, BisectionMatchesLinearScan) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 300; ++t) {
    const FactorModel m = random_model(rng, 1 + rng() % 400, t % 3 - 0.5);
    const RSequence r = compute_r_sequence(canonicalize(m));
    EXPECT_EQ(r.last_positive_index, last_positive_linear(r.values));
    EXPECT_TRUE(satisfies_r_invariants(r));
  }
}

TEST(RSequence, InvariantCheckerRejectsBadData) {
  RSequence r;
  r.values = {1.0, 0.5, 2.0, -1.0};
  r.peak_index = 0;
  r.last_positive_index = 2;
  EXPECT_FALSE(satisfies_r_invariants(r));
  r.values = {1.0, 2.0, -1.0, 0.5};
  r.peak_index = 1;
  r.last_positive_index = 1;
  EXPECT_FALSE(satisfies_r_invariants(r));
}

TEST(SolveLomv, ThreeAssetExample) {
  const LomvSolution s = solve_lomv(kThree);
  EXPECT_EQ(s.k, 1u);
  EXPECT_EQ(s.weights, (std::vector<double>{1.0, 0.0, 0.0}));
  EXPECT_DOUBLE_EQ(s.threshold_beta, 2.0);
  EXPECT_DOUBLE_EQ(s.variance, 2.0);
  EXPECT_EQ(s.active_original_indices, (std::vector<std::size_t>{0}));
}

TEST(SolveLomv, IdenticalBetasInverseVariance) {
  const LomvSolution s = solve_lomv(FactorModel(1.0, {1, 1, 1}, {1, 2, 4}));
  EXPECT_EQ(s.k, 3u);
  EXPECT_NEAR(s.weights[0], 4.0 / 7.0, 1e-15);
  EXPECT_NEAR(s.weights[1], 2.0 / 7.0, 1e-15);
  EXPECT_NEAR(s.weights[2], 1.0 / 7.0, 1e-15);
  EXPECT_EQ(s.threshold_beta, kNoThreshold);
}

TEST(SolveLomv, SingleAsset) {
  const LomvSolution s = solve_lomv(FactorModel(2.0, {-0.3}, {0.4}));
  EXPECT_EQ(s.weights, (std::vector<double>{1.0}));
  EXPECT_DOUBLE_EQ(s.variance, 2.0 * 0.09 + 0.4);
}

TEST(SolveLomv, UnsortedInputKeepsOriginalOrder) {
  const LomvSolution s =
      solve_lomv(FactorModel(1.0, {3.0, 1.0, 2.0}, {1.0, 1.0, 1.0}));
  EXPECT_EQ(s.weights, (std::vector<double>{0.0, 1.0, 0.0}));
  EXPECT_EQ(s.active_original_indices, (std::vector<std::size_t>{1}));
}

TEST(SolveLomv, MatchesOracleOnSmallInstances) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 100; ++t) {
    const FactorModel m = random_model(rng, 1 + rng() % 9, t % 3 - 0.5);
    const LomvSolution s = solve_lomv(m);
    const OracleResult o = oracle_solve(DenseCovariance::from_factor_model(m));
    ASSERT_EQ(s.active_original_indices, o.active_set) << "trial " << t;
    for (std::size_t i = 0; i < m.size(); ++i) {
      EXPECT_NEAR(s.weights[i], o.weights[i], 1e-10);
    }
  }
}

TEST(GmvLongShort, ThreeAssetExample) {
  const auto w = solve_gmv_longshort(kThree);
  EXPECT_NEAR(w[0], 1.0, 1e-15);
  EXPECT_NEAR(w[1], 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(w[2], -1.0 / 3.0, 1e-15);
}

TEST(GmvLongShort, MatchesDenseSolve) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 20; ++t) {
    const FactorModel m = random_model(rng, 2 + rng() % 30, 0.5);
    const auto w = solve_gmv_longshort(m);
    const std::size_t p = m.size();
    Eigen::MatrixXd sigma(p, p);
    for (std::size_t i = 0; i < p; ++i) {
      for (std::size_t j = 0; j < p; ++j) {
        sigma(i, j) = m.sigma2() * m.beta(i) * m.beta(j) +
                      (i == j ? m.delta2(i) : 0.0);
      }
    }
    Eigen::VectorXd x = sigma.llt().solve(Eigen::VectorXd::Ones(p));
    x /= x.sum();
    for (std::size_t i = 0; i < p; ++i) {
      EXPECT_NEAR(w[i], x(i), 1e-10);
    }
  }
}

TEST(GmvLongShort, SingleAssetAndIdentical) {
  EXPECT_EQ(solve_gmv_longshort(FactorModel(1.0, {2.0}, {1.0})),
            (std::vector<double>{1.0}));
  const FactorModel m(1.0, {1, 1, 1}, {1, 2, 4});
  const auto g = solve_gmv_longshort(m);
  const auto l = solve_lomv(m).weights;
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_NEAR(g[i], l[i], 1e-15);
  }
}

TEST(Threshold, ThreeAssetExample) {
  const SortedModel sm = canonicalize(kThree);
  const LomvSolution s = solve_lomv(sm);
  EXPECT_DOUBLE_EQ(threshold_beta(s, sm), 2.0);
}

TEST(Threshold, SeparatesActiveFromInactive) {
  std::mt19937_64 rng(17);
  for (int t = 0; t < 100; ++t) {
    const FactorModel m = random_model(rng, 2 + rng() % 200, t % 3 - 0.5);
    const SortedModel sm = canonicalize(m);
    const LomvSolution s = solve_lomv(sm);
    const double tau = s.threshold_beta;
    for (std::size_t i = 0; i < sm.size(); ++i) {
      const double w = s.weights[sm.perm()[i]];
      if (std::isinf(tau)) {
        EXPECT_GT(w, 0.0);
      } else {
        EXPECT_EQ(w > 0.0, sm.betas()[i] < tau) << "i=" << i;
      }
    }
    if (s.k < sm.size()) {
      EXPECT_LT(sm.betas()[s.k - 1], tau);
      EXPECT_LE(tau, sm.betas()[s.k]);
    }
  }
}

TEST(Kkt, SolverOutputPasses) {
  std::mt19937_64 rng(23);
  for (int t = 0; t < 50; ++t) {
    const FactorModel m = random_model(rng, 1 + rng() % 500, 0.7);
    const LomvSolution s = solve_lomv(m);
    const KktCertificate c = verify_kkt(m, s.weights, 1e-8);
    EXPECT_TRUE(c.passed) << "trial " << t;
    EXPECT_GE(c.complementarity_residual, 0.0);
  }
}

TEST(Kkt, UniformWeightsFail) {
  const std::vector<double> w(3, 1.0 / 3.0);
  const KktCertificate c = verify_kkt(kThree, w, 1e-8);
  EXPECT_FALSE(c.passed);
  EXPECT_LT(c.min_lambda, -1e-8);
}

TEST(Kkt, CornerOnHeterogeneousDeltaFails) {
  const FactorModel m(1.0, {1, 1, 1}, {1, 2, 4});
  const KktCertificate c = verify_kkt(m, std::vector<double>{1, 0, 0}, 1e-8);
  EXPECT_FALSE(c.passed);
}

TEST(Kkt, BudgetViolationFails) {
  const KktCertificate c =
      verify_kkt(kThree, std::vector<double>{0.5, 0.0, 0.0}, 1e-8);
  EXPECT_FALSE(c.passed);
  EXPECT_NEAR(c.budget_residual, 0.5, 1e-15);
}

TEST(ExtendUniverse, HighBetaAssetsDoNotMatter) {
  const LomvSolution base = solve_lomv(kThree);
  for (double b : {5.0, 2.0}) {
    const std::vector<double> nb{b};
    const std::vector<double> nd{0.3};
    const LomvSolution ext = extend_universe(kThree, nb, nd);
    EXPECT_EQ(ext.k, base.k);
    for (std::size_t i = 0; i < 3; ++i) {
      EXPECT_EQ(ext.weights[i], base.weights[i]);
    }
    EXPECT_EQ(ext.weights[3], 0.0);
  }
}

TEST(ExtendUniverse, LowBetaAssetMatchesOracle) {
  const std::vector<double> nb{0.5};
  const std::vector<double> nd{1.0};
  const LomvSolution ext = extend_universe(kThree, nb, nd);
  const FactorModel big(1.0, {1, 2, 3, 0.5}, {1, 1, 1, 1});
  const OracleResult o = oracle_solve(DenseCovariance::from_factor_model(big));
  EXPECT_EQ(ext.active_original_indices, o.active_set);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_NEAR(ext.weights[i], o.weights[i], 1e-12);
  }
}

TEST(Properties, SignFlipInvariance) {
  std::mt19937_64 rng(29);
  for (int t = 0; t < 50; ++t) {
    const FactorModel m = random_model(rng, 1 + rng() % 300, t % 3 - 0.5);
    const LomvSolution a = solve_lomv(m);
    const LomvSolution b = solve_lomv(m.negated());
    EXPECT_EQ(a.k, b.k);
    EXPECT_EQ(a.weights, b.weights);
  }
}

TEST(Properties, DeletionInvariance) {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 50; ++t) {
    const FactorModel m = random_model(rng, 3 + rng() % 100, 1.0);
    const SortedModel sm = canonicalize(m);
    const LomvSolution s = solve_lomv(sm);
    if (s.k + 1 >= sm.size()) {
      continue;
    }
    // Drop the asset at the top of the sorted order.
    const std::size_t drop = sm.perm()[sm.size() - 1];
    if (!(sm.betas()[sm.size() - 1] > sm.betas()[s.k])) {
      continue;
    }
    std::vector<double> b, d;
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (i != drop) {
        b.push_back(m.beta(i));
        d.push_back(m.delta2(i));
      }
    }
    const FactorModel smaller(m.sigma2(), b, d);
    if (canonicalize(smaller).flipped() != sm.flipped()) {
      continue;
    }
    const LomvSolution r = solve_lomv(smaller);
    EXPECT_EQ(r.k, s.k);
    for (std::size_t i = 0, j = 0; i < m.size(); ++i) {
      if (i == drop) {
        continue;
      }
      EXPECT_EQ(r.weights[j++], s.weights[i]);
    }
  }
}

TEST(Properties, VarianceOrdering) {
  std::mt19937_64 rng(37);
  for (int t = 0; t < 50; ++t) {
    const FactorModel m = random_model(rng, 1 + rng() % 300, t % 3 - 0.5);
    const LomvSolution s = solve_lomv(m);
    const auto g = solve_gmv_longshort(m);
    const double vg = portfolio_variance(m, g);
    EXPECT_GE(s.variance, vg * (1.0 - 1e-12));
    const bool gmv_long_only =
        std::all_of(g.begin(), g.end(), [](double x) { return x > 0.0; });
    if (gmv_long_only) {
      EXPECT_NEAR(s.variance, vg, 1e-12 * vg);
    } else {
      EXPECT_GT(s.variance, vg);
    }
  }
}

TEST(PortfolioVariance, MatchesCovarianceView) {
  const std::vector<double> w{0.5, 0.25, 0.25};
  EXPECT_DOUBLE_EQ(portfolio_variance(kThree, w),
                   CovarianceView(kThree).quadratic_form(w));
}

}  // namespace
}  // namespace lomv

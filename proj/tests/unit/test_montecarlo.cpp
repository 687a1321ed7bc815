#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "harness.hpp"
#include "lomv/error.hpp"
#include "lomv/montecarlo.hpp"
#include "lomv/solver.hpp"

namespace lomv {
namespace {

SimConfig small_config() {
  SimConfig c;
  c.dist = BetaDistribution::normal(1.0, 0.4);
  c.delta = DeltaModel::constant(0.5);
  c.p = 400;
  c.trials = 40;
  c.seed = 99;
  return c;
}

TEST(Summary, KnownValues) {
  const Summary s = summarize({1.0, 2.0, 3.0, 4.0, 5.0});
  EXPECT_DOUBLE_EQ(s.mean, 3.0);
  EXPECT_DOUBLE_EQ(s.sd, std::sqrt(2.5));
  EXPECT_DOUBLE_EQ(s.q50, 3.0);
  EXPECT_DOUBLE_EQ(s.q05, 1.2);
  EXPECT_DOUBLE_EQ(s.q95, 4.8);
}

TEST(DeltaModel, Nu2) {
  EXPECT_EQ(DeltaModel::constant(0.5).nu2(), 0.5);
  const DeltaModel u = DeltaModel::uniform(0.1, 0.5);
  EXPECT_NEAR(u.nu2(), 0.4 / std::log(5.0), 1e-15);
  EXPECT_THROW((void)DeltaModel::uniform(0.0, 1.0), InputError);
  EXPECT_THROW((void)DeltaModel::constant(-1.0), InputError);
}

TEST(SimConfig, Validation) {
  SimConfig c = small_config();
  c.p = 0;
  EXPECT_THROW(c.validate(), InputError);
  c = small_config();
  c.trials = 0;
  EXPECT_THROW(c.validate(), InputError);
  c = small_config();
  c.sigma2 = 0.0;
  EXPECT_THROW(c.validate(), InputError);
}

TEST(RunBatch, SerialAndParallelAreBitwiseEqual) {
  SimConfig c = small_config();
  c.parallel = false;
  const TrialBatch a = run_batch(c);
  c.parallel = true;
  const TrialBatch b = run_batch(c);
  const TrialBatch again = run_batch(c);
  EXPECT_EQ(a.active_ratios, b.active_ratios);
  EXPECT_EQ(a.active_counts, b.active_counts);
  EXPECT_EQ(b.active_ratios, again.active_ratios);
  EXPECT_EQ(a.trial_seeds, b.trial_seeds);
}

TEST(RunBatch, TrialDrawnAloneMatchesBatch) {
  const SimConfig c = small_config();
  const TrialBatch b = run_batch(c);
  for (std::size_t t : {0u, 7u, 39u}) {
    const LomvSolution s = solve_lomv(sample_trial(c, t));
    EXPECT_EQ(s.k, b.active_counts[t]);
  }
}

TEST(RunBatch, SeedsDiffer) {
  SimConfig c = small_config();
  const TrialBatch a = run_batch(c);
  c.seed = 100;
  const TrialBatch b = run_batch(c);
  EXPECT_NE(a.active_ratios, b.active_ratios);
}

TEST(RunBatch, SingleAssetAlwaysActive) {
  SimConfig c = small_config();
  c.p = 1;
  c.trials = 25;
  const TrialBatch b = run_batch(c);
  for (double r : b.active_ratios) {
    EXPECT_EQ(r, 1.0);
  }
}

TEST(EmpiricalG, BelowAllBetasIsBiasTerm) {
  const FactorModel m(2.0, {1.0, 2.0, 3.0}, {0.5, 0.5, 0.5});
  EXPECT_DOUBLE_EQ(empirical_g(m, 0.5, 0.5), 0.5 / (3.0 * 2.0));
}

TEST(EmpiricalG, MatchesRSequence) {
  const SimConfig c = small_config();
  for (std::size_t t = 0; t < 10; ++t) {
    const FactorModel m = sample_trial(c, t);
    const SortedModel sm = canonicalize(m);
    ASSERT_FALSE(sm.flipped());
    const RSequence r = compute_r_sequence(sm);
    const double scale = c.delta.nu2() / static_cast<double>(m.size());
    for (std::size_t i = 0; i < sm.size(); ++i) {
      const double g = empirical_g(m, c.delta.nu2(), sm.betas()[i]);
      EXPECT_NEAR(scale * r.values[i], g, 1e-12 * (1.0 + std::abs(g)));
    }
  }
}

TEST(EmpiricalBetaStar, CountsActiveAssets) {
  const SimConfig c = small_config();
  for (std::size_t t = 0; t < 20; ++t) {
    const FactorModel m = sample_trial(c, t);
    const auto bs = empirical_beta_star(m, c.delta.nu2());
    ASSERT_TRUE(bs.has_value());
    const auto below = std::count_if(m.betas().begin(), m.betas().end(),
                                     [&](double b) { return b < *bs; });
    EXPECT_EQ(static_cast<std::size_t>(below), solve_lomv(m).k);
  }
}

TEST(EmpiricalBetaStar, NoneForNegativeOrientation) {
  const FactorModel m(1.0, {-1.0, -2.0}, {1.0, 1.0});
  EXPECT_FALSE(empirical_beta_star(m, 1.0).has_value());
}

TEST(Nonconvergence, BlocksStayWhole) {
  SimConfig c = small_config();
  c.dist = harness::four_atom_distribution();
  c.delta = DeltaModel::constant(0.1);
  c.p = 1000;
  c.trials = 20;
  for (std::size_t t = 0; t < c.trials; ++t) {
    const FactorModel m = sample_trial(c, t);
    const LomvSolution s = solve_lomv(m);
    std::map<double, std::pair<int, int>> by_beta;
    for (std::size_t i = 0; i < m.size(); ++i) {
      auto& [active, inactive] = by_beta[m.beta(i)];
      (s.weights[i] > 0.0 ? active : inactive)++;
    }
    for (const auto& [beta, counts] : by_beta) {
      EXPECT_TRUE(counts.first == 0 || counts.second == 0) << "beta=" << beta;
    }
  }
}

TEST(Nonconvergence, ModesMatchRatios) {
  SimConfig c = small_config();
  c.dist = harness::four_atom_distribution();
  c.delta = DeltaModel::constant(0.1);
  c.p = 2000;
  c.trials = 60;
  const TrialBatch b = nonconvergence_experiment(c);
  const ModeCounts m = count_modes(b);
  EXPECT_EQ(m.other, 0u);
  EXPECT_GT(m.low, 0u);
  EXPECT_GT(m.high, 0u);
  for (std::size_t t = 0; t < c.trials; ++t) {
    const double target = b.modes[t] == TrialMode::kHigh ? 0.50 : 0.20;
    EXPECT_NEAR(b.active_ratios[t], target, 0.05);
    EXPECT_EQ(b.modes[t] == TrialMode::kHigh, b.beta_star_p[t] > 2.0);
  }
}

TEST(Nonconvergence, ContinuousIsAllOther) {
  const TrialBatch b = nonconvergence_experiment(small_config());
  EXPECT_EQ(count_modes(b).other, b.modes.size());
}

TEST(Bias, PositiveGpMovesZeroUp) {
  const SimConfig c = small_config();
  const TrialBatch b = run_batch(c);
  const double bs = b.population_beta_star;
  double mean_g = 0.0;
  for (std::size_t t = 0; t < c.trials; ++t) {
    if (b.g_p_at_beta_star[t] > 0.0) {
      EXPECT_GT(b.beta_star_p[t], bs);
    }
    mean_g += b.g_p_at_beta_star[t] / static_cast<double>(c.trials);
  }
  // E[G_p(beta*)] = nu2 / (p sigma2) + G(beta*) = nu2 / (p sigma2).
  const double bias = c.delta.nu2() / (static_cast<double>(c.p) * c.sigma2);
  EXPECT_NEAR(mean_g, bias, 3.0 * bias);
}

TEST(Sanity, ZeroMeanApproachesOne) {
  SimConfig c = small_config();
  c.dist = BetaDistribution::discrete({{-1.0, 0.5}, {1.0, 0.5}});
  c.trials = 30;
  c.p = 2000;
  EXPECT_GT(run_batch(c).summary.mean, 0.95);
  c.dist = BetaDistribution::normal(0.0, 1.0);
  c.p = 10000;
  EXPECT_GT(run_batch(c).summary.mean, 0.95);
}

TEST(Sanity, PositiveSupportApproachesZero) {
  SimConfig c = small_config();
  c.dist = BetaDistribution::uniform(0.5, 1.5);
  c.trials = 30;
  c.p = 100;
  const double small = run_batch(c).summary.mean;
  c.p = 10000;
  const double large = run_batch(c).summary.mean;
  EXPECT_LT(large, small);
  EXPECT_LT(large, 0.05);
}

}  // namespace
}  // namespace lomv

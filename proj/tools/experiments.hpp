#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "harness.hpp"
#include "lomv/asymptotics.hpp"
#include "lomv/montecarlo.hpp"
#include "lomv/solver.hpp"

namespace lomv::experiments {

struct TableCell {
  harness::PublishedCell published;
  SimConfig config;
  TrialBatch batch;
  double f_beta_star = 0.0;
  double beta_star = 0.0;
  /// (simulated mean - published mean) / (simulated sd / sqrt(trials)).
  double z_score = 0.0;
  bool within_4se = false;
};

/// Seed of table cell `index`, derived from the run seed.
[[nodiscard]] std::uint64_t cell_seed(std::uint64_t seed, std::size_t index);

/// Simulates the published grid (optionally only cells with the given
/// delta2). `trials` defaults to the published 400.
[[nodiscard]] std::vector<TableCell> run_table(
    std::uint64_t seed, std::size_t trials, bool parallel,
    std::optional<double> only_delta2 = std::nullopt);

struct NonconvergenceRun {
  std::size_t p = 0;
  TrialBatch batch;
  ModeCounts modes;
};

/// Four-atom distribution, sigma2 = 1, delta2 = 0.1, one batch per p.
[[nodiscard]] std::vector<NonconvergenceRun> run_nonconvergence(
    std::uint64_t seed, std::size_t trials, bool parallel,
    const std::vector<std::size_t>& ps = {500, 3000, 10000});

struct WeightComparison {
  FactorModel model;
  LomvSolution lomv;
  std::vector<double> gmv;
  std::size_t lomv_active = 0;
  std::size_t lomv_active_negative_beta = 0;
  std::size_t gmv_positive = 0;
};

/// One p = 5000 instance, betas ~ Normal(1, 0.4^2), delta = 0.5, sigma2 = 1,
/// solved both long-only and long-short.
[[nodiscard]] WeightComparison run_weight_comparison(std::uint64_t seed,
                                                     std::size_t p = 5000);

}  // namespace lomv::experiments

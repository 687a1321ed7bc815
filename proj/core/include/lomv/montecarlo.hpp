#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "lomv/distribution.hpp"
#include "lomv/model.hpp"

namespace lomv {

/// How idiosyncratic variances are drawn: a constant, or iid uniform on
/// [lo, hi] with lo > 0.
struct DeltaModel {
  enum class Kind { kConstant, kUniform };
  Kind kind = Kind::kConstant;
  double delta2 = 0.5;
  double lo = 0.0;
  double hi = 0.0;

  [[nodiscard]] static DeltaModel constant(double delta2);
  [[nodiscard]] static DeltaModel uniform(double lo, double hi);

  /// nu^2 with 1/nu^2 = E[1/delta^2].
  [[nodiscard]] double nu2() const;
};

struct SimConfig {
  BetaDistribution dist = BetaDistribution::normal(1.0, 0.4);
  DeltaModel delta = DeltaModel::constant(0.5);
  double sigma2 = 1.0;
  std::size_t p = 1000;
  std::size_t trials = 400;
  std::uint64_t seed = 0;
  bool parallel = true;

  /// Throws InputError when p, trials or sigma2 is out of range.
  void validate() const;
};

enum class TrialMode { kLow, kHigh, kOther };

[[nodiscard]] std::string to_string(TrialMode m);

struct Summary {
  double mean = 0.0;
  double sd = 0.0;
  double q05 = 0.0;
  double q50 = 0.0;
  double q95 = 0.0;
};

/// Sample mean, standard deviation (n - 1 denominator) and linearly
/// interpolated quantiles.
[[nodiscard]] Summary summarize(const std::vector<double>& values);

struct TrialBatch {
  std::size_t p = 0;
  double nu2 = 0.0;
  std::vector<std::uint64_t> trial_seeds;
  std::vector<std::size_t> active_counts;
  std::vector<double> active_ratios;
  /// Zero of the empirical G_p; NaN when the realized sample has no zero.
  std::vector<double> beta_star_p;
  /// G_p at the population beta*; empty when beta* is infinite.
  std::vector<double> g_p_at_beta_star;
  std::vector<TrialMode> modes;
  Summary summary;
  /// Population beta* used for g_p_at_beta_star and modes (+inf if none).
  double population_beta_star = 0.0;
};

/// Per-trial seed from (seed, trial index) via a SplitMix64 mix.
[[nodiscard]] std::uint64_t trial_seed(std::uint64_t seed,
                                       std::uint64_t trial) noexcept;

/// The factor model drawn for trial `trial` of `config`; identical whether
/// drawn alone or inside a batch.
[[nodiscard]] FactorModel sample_trial(const SimConfig& config,
                                       std::uint64_t trial);

/// Runs every trial, solving each instance for its active count. Results do
/// not depend on thread scheduling.
[[nodiscard]] TrialBatch run_batch(const SimConfig& config);

/// G_p(y) = nu2/(p sigma2) + (nu2/p) sum_j (beta_j/delta2_j)(beta_j - y) 1{beta_j <= y}.
[[nodiscard]] double empirical_g(const FactorModel& model, double nu2,
                                 double y);

/// Zero of G_p on (0, inf), computed exactly on its linear pieces between
/// sorted betas. nullopt when sum(beta/delta2) <= 0 for the raw sample.
[[nodiscard]] std::optional<double> empirical_beta_star(
    const FactorModel& model, double nu2);

/// run_batch plus a per-trial label: kHigh when the block of assets tied at
/// the population beta* is active (beta*(p) > beta*), kLow when it is not,
/// kOther when beta* is not an atom of the distribution.
[[nodiscard]] TrialBatch nonconvergence_experiment(const SimConfig& config);

struct ModeCounts {
  std::size_t low = 0;
  std::size_t high = 0;
  std::size_t other = 0;
};

[[nodiscard]] ModeCounts count_modes(const TrialBatch& batch);

}  // namespace lomv

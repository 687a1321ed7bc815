#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "lomv/model.hpp"

namespace lomv {

/// The sequence R_1..R_p over the sorted, oriented assets:
///   R_i = 1/sigma2 + sum_{j<i} (beta_j/delta2_j)(beta_j - beta_i).
///
/// It is non-decreasing up to `peak_index`, non-increasing after it, and
/// positive exactly on the prefix [0, last_positive_index]. The active set of
/// the long-only minimum-variance portfolio is that prefix.
struct RSequence {
  std::vector<double> values;
  /// Smallest sorted index whose prefix sum of beta/delta2 is positive
  /// (p - 1 when none is).
  std::size_t peak_index = 0;
  /// Largest sorted index with R > 0.
  std::size_t last_positive_index = 0;

  [[nodiscard]] std::size_t active_count() const noexcept {
    return last_positive_index + 1;
  }
};

[[nodiscard]] RSequence compute_r_sequence(const SortedModel& sm);

/// Reference scan for the last positive R; used to cross-check the bisection.
[[nodiscard]] std::size_t last_positive_linear(std::span<const double> values);

/// True when `values` is non-decreasing up to `peak` and non-increasing after,
/// and positive on [0, last_positive] and non-positive beyond. Exact
/// comparisons, no tolerance.
[[nodiscard]] bool satisfies_r_invariants(const RSequence& r);

inline constexpr double kNoThreshold = std::numeric_limits<double>::infinity();

struct LomvSolution {
  /// Number of active (strictly positive weight) assets.
  std::size_t k = 0;
  /// Weights in the caller's original asset order.
  std::vector<double> weights;
  /// B_K / C_K in the canonical orientation, or kNoThreshold when every
  /// asset is active.
  double threshold_beta = kNoThreshold;
  double variance = 0.0;
  /// Original indices of active assets, ascending.
  std::vector<std::size_t> active_original_indices;
  /// Whether the canonical orientation negated the betas. When set, the
  /// threshold applies to -beta.
  bool flipped = false;
};

[[nodiscard]] LomvSolution solve_lomv(const FactorModel& model);
[[nodiscard]] LomvSolution solve_lomv(const SortedModel& sm);

/// Unconstrained fully invested minimum variance, Sigma^{-1} 1 / 1^T Sigma^{-1} 1,
/// via the Woodbury identity in O(p). Original asset order.
[[nodiscard]] std::vector<double> solve_gmv_longshort(const FactorModel& model);

/// (1/sigma2 + sum_{j<=k} beta_j^2/delta2_j) / sum_{j<=k} beta_j/delta2_j,
/// or kNoThreshold when sol.k == p.
[[nodiscard]] double threshold_beta(const LomvSolution& sol,
                                    const SortedModel& sm);

/// Solves the instance with extra assets appended after the original ones.
[[nodiscard]] LomvSolution extend_universe(const FactorModel& model,
                                           std::span<const double> new_betas,
                                           std::span<const double> new_delta2s);

/// w^T Sigma w through the factor decomposition.
[[nodiscard]] double portfolio_variance(const FactorModel& model,
                                       std::span<const double> weights);

/// KKT residuals for min w^T Sigma w s.t. 1^T w = 1, w >= 0.
struct KktCertificate {
  double stationarity_residual = 0.0;
  double complementarity_residual = 0.0;
  double min_lambda = 0.0;
  double min_weight = 0.0;
  double budget_residual = 0.0;
  double nu = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

/// Reconstructs nu = -2 w^T Sigma w and lambda = 2 Sigma w + nu 1, then
/// reports every residual. A failing certificate is a result, not an error.
[[nodiscard]] KktCertificate verify_kkt(const FactorModel& model,
                                        std::span<const double> weights,
                                        double tolerance);

}  // namespace lomv

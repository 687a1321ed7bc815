#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "lomv/model.hpp"

namespace lomv {

/// A symmetric positive definite covariance held densely.
class DenseCovariance {
 public:
  /// Throws InputError if `entries` is not square, not symmetric to 1e-12,
  /// or not positive definite.
  explicit DenseCovariance(Eigen::MatrixXd entries);

  [[nodiscard]] static DenseCovariance from_factor_model(
      const FactorModel& model,
      std::size_t cap = CovarianceView::kDefaultDenseCap);

  [[nodiscard]] std::size_t size() const noexcept {
    return static_cast<std::size_t>(entries_.rows());
  }
  [[nodiscard]] const Eigen::MatrixXd& entries() const noexcept {
    return entries_;
  }

 private:
  Eigen::MatrixXd entries_;
};

struct OracleResult {
  std::vector<double> weights;
  std::vector<std::size_t> active_set;
  double variance = 0.0;
  std::uint64_t candidates_examined = 0;
};

inline constexpr std::size_t kDefaultOracleCap = 15;

/// Brute-force long-only minimum variance: for every non-empty subset K,
/// solves the restricted problem Sigma^K w = 1 (normalized), keeps strictly
/// positive candidates, and returns the one with least variance. Subsets are
/// visited in increasing bitmask order; ties go to the lexicographically
/// smaller index set.
///
/// Throws InputError when size() > cap.
[[nodiscard]] OracleResult oracle_solve(const DenseCovariance& cov,
                                        std::size_t cap = kDefaultOracleCap);

/// Normalized (Sigma^K)^{-1} 1 embedded with zeros outside `subset`, or
/// nullopt when any restricted weight is <= 0.
[[nodiscard]] std::optional<std::vector<double>> oracle_restricted_weights(
    const DenseCovariance& cov, std::span<const std::size_t> subset);

}  // namespace lomv

#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace lomv {

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  [[nodiscard]] double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// One-factor covariance instance: Sigma = sigma2 * beta beta^T + diag(delta2).
///
/// Construction validates the instance; a FactorModel is immutable afterwards.
class FactorModel {
 public:
  /// Throws InputError on p = 0, mismatched lengths, non-finite values,
  /// sigma2 <= 0, any delta2 <= 0, or all betas zero.
  FactorModel(double sigma2, std::vector<double> betas,
              std::vector<double> delta2s);

  [[nodiscard]] std::size_t size() const noexcept { return betas_.size(); }
  [[nodiscard]] double sigma2() const noexcept { return sigma2_; }
  [[nodiscard]] std::span<const double> betas() const noexcept {
    return betas_;
  }
  [[nodiscard]] std::span<const double> delta2s() const noexcept {
    return delta2s_;
  }
  [[nodiscard]] double beta(std::size_t i) const { return betas_.at(i); }
  [[nodiscard]] double delta2(std::size_t i) const { return delta2s_.at(i); }

  /// The same covariance with every beta negated.
  [[nodiscard]] FactorModel negated() const;

 private:
  double sigma2_;
  std::vector<double> betas_;
  std::vector<double> delta2s_;
};

/// A FactorModel oriented so that sum(beta/delta2) >= 0 and stably sorted by
/// beta, with prefix sums of beta/delta2 and beta^2/delta2 in sorted order.
class SortedModel {
 public:
  [[nodiscard]] std::size_t size() const noexcept { return betas_.size(); }
  [[nodiscard]] double sigma2() const noexcept { return sigma2_; }
  [[nodiscard]] bool flipped() const noexcept { return flipped_; }

  /// Betas and idiosyncratic variances in sorted order (already oriented).
  [[nodiscard]] std::span<const double> betas() const noexcept {
    return betas_;
  }
  [[nodiscard]] std::span<const double> delta2s() const noexcept {
    return delta2s_;
  }
  /// perm()[i] is the original index of the asset at sorted position i.
  [[nodiscard]] std::span<const std::size_t> perm() const noexcept {
    return perm_;
  }
  /// prefix_s1()[i] = sum_{j<=i} beta_j / delta2_j.
  [[nodiscard]] std::span<const double> prefix_s1() const noexcept {
    return prefix_s1_;
  }
  /// prefix_s2()[i] = sum_{j<=i} beta_j^2 / delta2_j.
  [[nodiscard]] std::span<const double> prefix_s2() const noexcept {
    return prefix_s2_;
  }

  /// The oriented, sorted instance as a plain FactorModel.
  [[nodiscard]] FactorModel base() const;

 private:
  friend SortedModel canonicalize(const FactorModel& model);
  SortedModel() = default;

  double sigma2_ = 1.0;
  bool flipped_ = false;
  std::vector<double> betas_;
  std::vector<double> delta2s_;
  std::vector<std::size_t> perm_;
  std::vector<double> prefix_s1_;
  std::vector<double> prefix_s2_;
};

/// Orients (negating all betas when sum(beta/delta2) < 0), stably sorts by
/// beta, and accumulates compensated prefix sums.
[[nodiscard]] SortedModel canonicalize(const FactorModel& model);

/// Entrywise access to Sigma without materializing it.
class CovarianceView {
 public:
  static constexpr std::size_t kDefaultDenseCap = 2000;

  explicit CovarianceView(const FactorModel& model) noexcept
      : sigma2_(model.sigma2()),
        betas_(model.betas()),
        delta2s_(model.delta2s()) {}
  explicit CovarianceView(const SortedModel& model) noexcept
      : sigma2_(model.sigma2()),
        betas_(model.betas()),
        delta2s_(model.delta2s()) {}

  [[nodiscard]] std::size_t size() const noexcept { return betas_.size(); }

  /// sigma2 * beta_i * beta_j + delta2_i * [i == j]; throws std::out_of_range.
  [[nodiscard]] double entry(std::size_t i, std::size_t j) const;

  /// Sigma * w in O(p).
  [[nodiscard]] std::vector<double> multiply(std::span<const double> w) const;

  /// w^T Sigma w as sigma2 (beta.w)^2 + sum delta2_i w_i^2.
  [[nodiscard]] double quadratic_form(std::span<const double> w) const;

  /// Row-major dense copy. Throws InputError when p exceeds `cap`.
  [[nodiscard]] std::vector<double> materialize(
      std::size_t cap = kDefaultDenseCap) const;

 private:
  double sigma2_;
  std::span<const double> betas_;
  std::span<const double> delta2s_;
};

}  // namespace lomv

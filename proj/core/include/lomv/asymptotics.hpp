#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lomv/distribution.hpp"

namespace lomv {

/// G(y) = integral_{-inf}^{y} (x^2 - y x) dF(x), for y >= 0.
///
/// Concave on [0, inf) with G(0) = E[beta^2; beta <= 0]. Its zero determines
/// the limiting fraction of active assets as p grows.
class GCurve {
 public:
  enum class Method { kClosedFormDiscrete, kQuadrature, kClosedFormNormal };

  /// Picks the closed form where one exists, quadrature otherwise.
  explicit GCurve(BetaDistribution dist);
  /// Forces a method; throws InputError if it does not apply to the kind.
  GCurve(BetaDistribution dist, Method method);

  [[nodiscard]] const BetaDistribution& distribution() const noexcept {
    return dist_;
  }
  [[nodiscard]] Method method() const noexcept { return method_; }

  /// Throws InputError for non-finite or negative y.
  [[nodiscard]] double operator()(double y) const;

 private:
  BetaDistribution dist_;
  Method method_;
};

[[nodiscard]] std::string to_string(GCurve::Method m);

[[nodiscard]] double g_eval(const GCurve& curve, double y);

/// Absolute tolerance of the quadrature path.
inline constexpr double kQuadratureTolerance = 1e-10;
/// Quadrature integrates from mean - kTruncationScales * scale.
inline constexpr double kTruncationScales = 12.0;
/// |E[beta]| at or below this counts as zero mean.
inline constexpr double kZeroMeanTolerance = 1e-12;
/// Bisection stops at this bracket width.
inline constexpr double kRootWidth = 1e-12;

enum class AsymptoticCase {
  kNegativeMassPositiveMean,
  kNegativeMassZeroMean,
  kNonnegativeSupport,
};

[[nodiscard]] std::string to_string(AsymptoticCase c);

struct AsymptoticReport {
  AsymptoticCase case_label = AsymptoticCase::kNegativeMassPositiveMean;
  /// +inf in the zero-mean case, where G has no zero.
  double beta_star = 0.0;
  /// Present when lim k_p/p exists.
  std::optional<double> limit;
  double liminf = 0.0;
  double limsup = 0.0;
  double atom_at_beta_star = 0.0;
  double f_beta_star = 0.0;
  double f_beta_star_left = 0.0;
  double prob_negative = 0.0;
  double mean = 0.0;
  /// True when the distribution was negated to make the mean non-negative.
  bool flipped = false;
};

/// Classifies F into the three asymptotic regimes and locates beta*.
[[nodiscard]] AsymptoticReport classify_and_solve(const BetaDistribution& dist);

/// Smallest zero of G on (0, inf) for a distribution with G(0) > 0 and
/// positive mean. Discrete kinds are solved on the linear segment holding the
/// sign change; others by bisection.
[[nodiscard]] double find_g_zero(const GCurve& curve);

/// Constants of the cube-root bound on F(y*):
///   theta = 27 (K + C sqrt(K) / mu) M^2,
///   F(y*) <= eps + theta^{1/3} eps^{1/3} with eps = F(0).
struct ThetaBound {
  double mu = 0.0;
  double second_moment_c = 0.0;
  double cond_neg_second_k = 0.0;
  double concentration_m = 0.0;

  [[nodiscard]] double theta() const;
  [[nodiscard]] double bound(double epsilon) const;
};

/// Throws InputError on non-positive or non-finite constants or epsilon
/// outside (0, 1).
[[nodiscard]] double theta_bound(const ThetaBound& params, double epsilon);

/// Constants for Normal(mu, s^2): C = mu^2 + s^2, K = E[X^2 | X <= 0],
/// M = 1 / (s sqrt(2 pi)).
[[nodiscard]] ThetaBound normal_theta_constants(double mu, double s);

struct BoundCheck {
  double epsilon = 0.0;
  double y_star = 0.0;
  double f_y_star = 0.0;
  double bound = 0.0;
  /// bound - F(y*).
  double margin = 0.0;
  bool skipped = false;
  bool passed = false;
};

/// For each distribution, checks F(y*) <= F(0) + theta^{1/3} F(0)^{1/3}.
/// Distributions with F(0) = 0 are skipped.
[[nodiscard]] std::vector<BoundCheck> verify_bound_on_family(
    std::span<const BetaDistribution> dists, const ThetaBound& params);

}  // namespace lomv

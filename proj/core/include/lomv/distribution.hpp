#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace lomv {

struct NormalBeta {
  double mu;
  double s;
};

struct Atom {
  double location;
  double mass;
};

/// Finitely many atoms, sorted by location, masses summing to one.
struct DiscreteBeta {
  std::vector<Atom> atoms;
};

struct UniformBeta {
  double a;
  double b;
};

/// Distribution F of a generic beta draw.
///
/// Empirical distributions are stored as discrete ones (equal mass per
/// sample, ties merged) but remember their origin for reporting.
class BetaDistribution {
 public:
  enum class Kind { kNormal, kDiscrete, kUniform, kEmpirical };

  [[nodiscard]] static BetaDistribution normal(double mu, double s);
  /// Atoms may come unsorted and with repeated locations; masses must be
  /// positive and sum to 1 within 1e-12.
  [[nodiscard]] static BetaDistribution discrete(std::vector<Atom> atoms);
  [[nodiscard]] static BetaDistribution uniform(double a, double b);
  [[nodiscard]] static BetaDistribution empirical(
      std::span<const double> samples);

  [[nodiscard]] Kind kind() const noexcept { return kind_; }
  [[nodiscard]] std::string kind_name() const;

  /// Non-null for the matching kind (empirical answers as discrete).
  [[nodiscard]] const NormalBeta* as_normal() const noexcept {
    return std::get_if<NormalBeta>(&repr_);
  }
  [[nodiscard]] const DiscreteBeta* as_discrete() const noexcept {
    return std::get_if<DiscreteBeta>(&repr_);
  }
  [[nodiscard]] const UniformBeta* as_uniform() const noexcept {
    return std::get_if<UniformBeta>(&repr_);
  }
  [[nodiscard]] bool is_atomic() const noexcept {
    return as_discrete() != nullptr;
  }

  /// F(x) = P(beta <= x).
  [[nodiscard]] double cdf(double x) const;
  /// F(x-) = P(beta < x).
  [[nodiscard]] double cdf_left(double x) const;
  /// P(beta = x).
  [[nodiscard]] double atom_mass(double x) const;

  [[nodiscard]] double mean() const;
  [[nodiscard]] double second_moment() const;
  /// E[beta^2 ; beta <= 0].
  [[nodiscard]] double negative_tail_second_moment() const;
  /// inf{x : F(x) > 0}, -inf for unbounded support.
  [[nodiscard]] double support_lower() const;
  /// Spread used for quadrature truncation (standard deviation).
  [[nodiscard]] double scale() const;
  /// sup of the density on [0, inf); +inf when F has atoms on (0, inf).
  [[nodiscard]] double density_sup_nonnegative() const;

  /// The distribution of -beta.
  [[nodiscard]] BetaDistribution negated() const;

  /// One draw. Normal uses std::normal_distribution; discrete and uniform
  /// use inverse-CDF on a 53-bit uniform.
  [[nodiscard]] double sample(std::mt19937_64& rng) const;
  /// `n` consecutive draws sharing one normal generator state.
  [[nodiscard]] std::vector<double> sample_n(std::mt19937_64& rng,
                                             std::size_t n) const;

 private:
  using Repr = std::variant<NormalBeta, DiscreteBeta, UniformBeta>;
  BetaDistribution(Kind kind, Repr repr)
      : kind_(kind), repr_(std::move(repr)) {}

  Kind kind_;
  Repr repr_;
  // Cumulative masses for discrete sampling.
  std::vector<double> cumulative_;
};

/// Uniform on [0, 1) from the top 53 bits of one engine output.
[[nodiscard]] double uniform01(std::mt19937_64& rng) noexcept;

/// Standard normal cdf and density.
[[nodiscard]] double normal_cdf(double z) noexcept;
[[nodiscard]] double normal_pdf(double z) noexcept;

}  // namespace lomv

#pragma once

#include <array>
#include <cstdint>
#include <random>

#include "lomv/distribution.hpp"
#include "lomv/model.hpp"

namespace lomv::harness {

/// Random one-factor instance for solver-vs-oracle checks: p uniform in
/// [1, p_max], betas standard normal shifted by one of {-0.5, 0, 1}, delta2
/// log-uniform in [0.01, 10], sigma2 log-uniform in [0.1, 10].
[[nodiscard]] FactorModel random_oracle_instance(std::mt19937_64& rng,
                                                 std::size_t p_max);

/// One cell of the published active-ratio table: mean +- sd of k/p over 400
/// trials with betas ~ Normal(1, s^2) and sigma2 = 1. Published reference
/// values, used only as a comparison fixture.
struct PublishedCell {
  double s;
  double delta2;
  double f_beta_star;
  std::size_t p;
  double mean;
  double sd;
};

inline constexpr std::size_t kPublishedTrials = 400;

inline constexpr std::array<PublishedCell, 18> kPublishedTable{{
    {0.4, 0.5, 0.03762, 500, 0.0659, 0.0135},
    {0.4, 0.5, 0.03762, 3000, 0.0444, 0.0072},
    {0.4, 0.5, 0.03762, 10000, 0.0394, 0.0043},
    {0.4, 0.1, 0.03762, 500, 0.0439, 0.0160},
    {0.4, 0.1, 0.03762, 3000, 0.0394, 0.0078},
    {0.4, 0.1, 0.03762, 10000, 0.0377, 0.0044},
    {0.25, 0.5, 0.00021, 500, 0.0307, 0.0045},
    {0.25, 0.5, 0.00021, 3000, 0.0083, 0.0009},
    {0.25, 0.5, 0.00021, 10000, 0.0036, 0.0004},
    {0.25, 0.1, 0.00021, 500, 0.0102, 0.0024},
    {0.25, 0.1, 0.00021, 3000, 0.0029, 0.0006},
    {0.25, 0.1, 0.00021, 10000, 0.0013, 0.0002},
    {0.1, 0.5, 0.00000, 500, 0.0354, 0.0061},
    {0.1, 0.5, 0.00000, 3000, 0.0075, 0.0012},
    {0.1, 0.5, 0.00000, 10000, 0.0026, 0.0004},
    {0.1, 0.1, 0.00000, 500, 0.0100, 0.0032},
    {0.1, 0.1, 0.00000, 3000, 0.0021, 0.0006},
    {0.1, 0.1, 0.00000, 10000, 0.0007, 0.0002},
}};

/// P(-1) = 0.05, P(1) = 0.15, P(2) = 0.30, P(5) = 0.50. Its G has its zero
/// exactly on the atom at 2, so k/p oscillates between 0.20 and 0.50.
[[nodiscard]] BetaDistribution four_atom_distribution();

}  // namespace lomv::harness

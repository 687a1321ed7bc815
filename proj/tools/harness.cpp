#include "harness.hpp"

#include <cmath>
#include <vector>

namespace lomv::harness {

namespace {

double log_uniform(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
  return std::exp(u(rng));
}

}  // namespace

FactorModel random_oracle_instance(std::mt19937_64& rng, std::size_t p_max) {
  std::uniform_int_distribution<std::size_t> pick_p(1, p_max);
  std::uniform_int_distribution<int> pick_shift(0, 2);
  std::normal_distribution<double> gauss(0.0, 1.0);
  constexpr std::array<double, 3> kShifts{-0.5, 0.0, 1.0};

  const std::size_t p = pick_p(rng);
  const double shift = kShifts[static_cast<std::size_t>(pick_shift(rng))];
  const double sigma2 = log_uniform(rng, 0.1, 10.0);
  std::vector<double> betas(p);
  std::vector<double> delta2s(p);
  for (std::size_t i = 0; i < p; ++i) {
    betas[i] = gauss(rng) + shift;
    delta2s[i] = log_uniform(rng, 0.01, 10.0);
  }
  return FactorModel(sigma2, std::move(betas), std::move(delta2s));
}

BetaDistribution four_atom_distribution() {
  return BetaDistribution::discrete(
      {{-1.0, 0.05}, {1.0, 0.15}, {2.0, 0.30}, {5.0, 0.50}});
}

}  // namespace lomv::harness

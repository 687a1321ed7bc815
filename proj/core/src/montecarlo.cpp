#include "lomv/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <thread>

#include "lomv/asymptotics.hpp"
#include "lomv/error.hpp"
#include "lomv/solver.hpp"

namespace lomv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double orientation_sum(const FactorModel& model) {
  CompensatedSum s;
  for (std::size_t i = 0; i < model.size(); ++i) {
    s.add(model.betas()[i] / model.delta2s()[i]);
  }
  return s.value();
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.size() == 1) {
    return sorted.front();
  }
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

template <class Fn>
void for_each_trial(std::size_t trials, bool parallel, Fn&& fn) {
  const std::size_t workers =
      parallel ? std::min<std::size_t>(
                     trials, std::max(1u, std::thread::hardware_concurrency()))
               : 1;
  if (workers <= 1) {
    for (std::size_t t = 0; t < trials; ++t) {
      fn(t);
    }
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t t = next++; t < trials; t = next++) {
        try {
          fn(t);
        } catch (...) {
          const std::lock_guard lock(failure_mutex);
          if (!failure) {
            failure = std::current_exception();
          }
        }
      }
    });
  }
  for (auto& th : pool) {
    th.join();
  }
  if (failure) {
    std::rethrow_exception(failure);
  }
}

}  // namespace

DeltaModel DeltaModel::constant(double delta2) {
  if (!std::isfinite(delta2) || delta2 <= 0.0) {
    throw InputError("constant delta2 must be finite and positive");
  }
  DeltaModel m;
  m.kind = Kind::kConstant;
  m.delta2 = delta2;
  return m;
}

DeltaModel DeltaModel::uniform(double lo, double hi) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || lo <= 0.0 || !(lo < hi)) {
    throw InputError("uniform delta2 needs 0 < lo < hi");
  }
  DeltaModel m;
  m.kind = Kind::kUniform;
  m.lo = lo;
  m.hi = hi;
  return m;
}

double DeltaModel::nu2() const {
  if (kind == Kind::kConstant) {
    return delta2;
  }
  // E[1/delta2] = log(hi/lo) / (hi - lo).
  return (hi - lo) / std::log(hi / lo);
}

void SimConfig::validate() const {
  if (p < 1) {
    throw InputError("p must be at least 1");
  }
  if (trials < 1) {
    throw InputError("trials must be at least 1");
  }
  if (!std::isfinite(sigma2) || sigma2 <= 0.0) {
    throw InputError("sigma2 must be finite and positive");
  }
  if (delta.kind == DeltaModel::Kind::kConstant) {
    (void)DeltaModel::constant(delta.delta2);
  } else {
    (void)DeltaModel::uniform(delta.lo, delta.hi);
  }
}

std::string to_string(TrialMode m) {
  switch (m) {
    case TrialMode::kLow:
      return "low";
    case TrialMode::kHigh:
      return "high";
    case TrialMode::kOther:
      return "other";
  }
  return "other";
}

Summary summarize(const std::vector<double>& values) {
  if (values.empty()) {
    throw InputError("cannot summarize an empty sample");
  }
  Summary s;
  CompensatedSum total;
  for (double v : values) {
    total.add(v);
  }
  const auto n = static_cast<double>(values.size());
  s.mean = total.value() / n;
  CompensatedSum sq;
  for (double v : values) {
    sq.add((v - s.mean) * (v - s.mean));
  }
  s.sd = values.size() > 1 ? std::sqrt(sq.value() / (n - 1.0)) : 0.0;
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  s.q05 = quantile_sorted(sorted, 0.05);
  s.q50 = quantile_sorted(sorted, 0.50);
  s.q95 = quantile_sorted(sorted, 0.95);
  return s;
}

std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial) noexcept {
  // SplitMix64 finalizer over a Weyl step keyed by the trial index.
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (trial + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

FactorModel sample_trial(const SimConfig& config, std::uint64_t trial) {
  std::mt19937_64 rng(trial_seed(config.seed, trial));
  std::vector<double> betas = config.dist.sample_n(rng, config.p);
  std::vector<double> delta2s(config.p, config.delta.delta2);
  if (config.delta.kind == DeltaModel::Kind::kUniform) {
    for (double& d : delta2s) {
      d = config.delta.lo + (config.delta.hi - config.delta.lo) * uniform01(rng);
    }
  }
  return FactorModel(config.sigma2, std::move(betas), std::move(delta2s));
}

double empirical_g(const FactorModel& model, double nu2, double y) {
  if (!(nu2 > 0.0)) {
    throw InputError("nu2 must be positive");
  }
  const auto p = static_cast<double>(model.size());
  CompensatedSum s;
  for (std::size_t j = 0; j < model.size(); ++j) {
    const double b = model.betas()[j];
    if (b <= y) {
      s.add(b / model.delta2s()[j] * (b - y));
    }
  }
  return nu2 / (p * model.sigma2()) + nu2 / p * s.value();
}

std::optional<double> empirical_beta_star(const FactorModel& model,
                                          double nu2) {
  if (!(nu2 > 0.0)) {
    throw InputError("nu2 must be positive");
  }
  if (!(orientation_sum(model) > 0.0)) {
    return std::nullopt;
  }
  const std::size_t p = model.size();
  const auto betas = model.betas();
  const auto delta2s = model.delta2s();
  std::vector<std::size_t> order(p);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return betas[a] < betas[b];
  });

  // (p / nu2) G_p(y) = 1/sigma2 + S2 - y S1 with sums over beta_j <= y; it is
  // linear between consecutive distinct betas.
  const double inv_sigma2 = 1.0 / model.sigma2();
  CompensatedSum s1;
  CompensatedSum s2;
  std::size_t i = 0;
  while (i < p && betas[order[i]] <= 0.0) {
    const double b = betas[order[i]];
    s1.add(b / delta2s[order[i]]);
    s2.add(b * b / delta2s[order[i]]);
    ++i;
  }
  double lo = 0.0;
  while (i < p) {
    const double hi = betas[order[i]];
    const double h_hi = inv_sigma2 + s2.value() - hi * s1.value();
    if (h_hi <= 0.0) {
      if (h_hi == 0.0) {
        return hi;
      }
      const double root = (inv_sigma2 + s2.value()) / s1.value();
      return std::clamp(root, std::nextafter(lo, hi), hi);
    }
    for (; i < p && betas[order[i]] == hi; ++i) {
      s1.add(hi / delta2s[order[i]]);
      s2.add(hi * hi / delta2s[order[i]]);
    }
    lo = hi;
  }
  const double root = (inv_sigma2 + s2.value()) / s1.value();
  return std::max(root, std::nextafter(lo, kInf));
}

TrialBatch run_batch(const SimConfig& config) {
  config.validate();
  TrialBatch batch;
  batch.p = config.p;
  batch.nu2 = config.delta.nu2();
  batch.population_beta_star = kInf;
  try {
    const AsymptoticReport rep = classify_and_solve(config.dist);
    batch.population_beta_star = rep.beta_star;
  } catch (const InputError&) {
    // No population beta* (e.g. mass only at zero); G_p(beta*) left empty.
  }
  const bool have_beta_star = std::isfinite(batch.population_beta_star);

  const std::size_t n = config.trials;
  batch.trial_seeds.resize(n);
  batch.active_counts.resize(n);
  batch.active_ratios.resize(n);
  batch.beta_star_p.resize(n);
  if (have_beta_star) {
    batch.g_p_at_beta_star.resize(n);
  }
  batch.modes.assign(n, TrialMode::kOther);

  for_each_trial(n, config.parallel, [&](std::size_t t) {
    batch.trial_seeds[t] = trial_seed(config.seed, t);
    FactorModel model = sample_trial(config, t);
    if (orientation_sum(model) < 0.0) {
      model = model.negated();
    }
    const LomvSolution sol = solve_lomv(model);
    batch.active_counts[t] = sol.k;
    batch.active_ratios[t] =
        static_cast<double>(sol.k) / static_cast<double>(config.p);
    batch.beta_star_p[t] = empirical_beta_star(model, batch.nu2).value_or(kNaN);
    if (have_beta_star) {
      batch.g_p_at_beta_star[t] =
          empirical_g(model, batch.nu2, batch.population_beta_star);
    }
  });
  batch.summary = summarize(batch.active_ratios);
  return batch;
}

TrialBatch nonconvergence_experiment(const SimConfig& config) {
  TrialBatch batch = run_batch(config);
  const double beta_star = batch.population_beta_star;
  if (!std::isfinite(beta_star) ||
      classify_and_solve(config.dist).atom_at_beta_star <= 0.0) {
    return batch;
  }
  for (std::size_t t = 0; t < config.trials; ++t) {
    const double bp = batch.beta_star_p[t];
    if (std::isnan(bp)) {
      continue;
    }
    batch.modes[t] = bp > beta_star ? TrialMode::kHigh : TrialMode::kLow;
  }
  return batch;
}

ModeCounts count_modes(const TrialBatch& batch) {
  ModeCounts c;
  for (TrialMode m : batch.modes) {
    switch (m) {
      case TrialMode::kLow:
        ++c.low;
        break;
      case TrialMode::kHigh:
        ++c.high;
        break;
      case TrialMode::kOther:
        ++c.other;
        break;
    }
  }
  return c;
}

}  // namespace lomv

#include "lomv/solver.hpp"

#include <algorithm>
#include <string>

#include "lomv/error.hpp"

namespace lomv {

namespace {

// Sums over sorted positions [0, i).
double prefix_before(std::span<const double> prefix, std::size_t i) {
  return i == 0 ? 0.0 : prefix[i - 1];
}

}  // namespace

RSequence compute_r_sequence(const SortedModel& sm) {
  const std::size_t p = sm.size();
  const auto betas = sm.betas();
  const auto s1 = sm.prefix_s1();
  const auto s2 = sm.prefix_s2();
  const double inv_sigma2 = 1.0 / sm.sigma2();

  RSequence r;
  r.values.resize(p);
  // R is constant across a block of tied betas, so it is evaluated once at
  // the start of each block and copied.
  for (std::size_t i = 0; i < p; ++i) {
    if (i > 0 && betas[i] == betas[i - 1]) {
      r.values[i] = r.values[i - 1];
      continue;
    }
    r.values[i] =
        inv_sigma2 + prefix_before(s2, i) - betas[i] * prefix_before(s1, i);
  }

  const auto first_positive =
      std::find_if(s1.begin(), s1.end(), [](double c) { return c > 0.0; });
  r.peak_index = first_positive == s1.end()
                     ? p - 1
                     : static_cast<std::size_t>(first_positive - s1.begin());

  // R is positive at the peak; bisect the non-increasing tail for the last
  // positive entry.
  std::size_t lo = r.peak_index;
  std::size_t hi = p;
  while (hi - lo > 1) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (r.values[mid] > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  r.last_positive_index = lo;
  return r;
}

std::size_t last_positive_linear(std::span<const double> values) {
  std::size_t last = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] > 0.0) {
      last = i;
    }
  }
  return last;
}

bool satisfies_r_invariants(const RSequence& r) {
  const auto& v = r.values;
  if (v.empty() || !(v.front() > 0.0) || r.peak_index >= v.size() ||
      r.last_positive_index >= v.size()) {
    return false;
  }
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (i <= r.peak_index ? v[i] < v[i - 1] : v[i] > v[i - 1]) {
      return false;
    }
  }
  for (std::size_t i = 0; i < v.size(); ++i) {
    if ((i <= r.last_positive_index) != (v[i] > 0.0)) {
      return false;
    }
  }
  return true;
}

LomvSolution solve_lomv(const FactorModel& model) {
  return solve_lomv(canonicalize(model));
}

LomvSolution solve_lomv(const SortedModel& sm) {
  const std::size_t p = sm.size();
  const RSequence r = compute_r_sequence(sm);
  const std::size_t k = r.active_count();

  const auto betas = sm.betas();
  const auto delta2s = sm.delta2s();
  const double b_k = 1.0 / sm.sigma2() + sm.prefix_s2()[k - 1];
  const double c_k = sm.prefix_s1()[k - 1];
  const double ratio = c_k / b_k;

  // Unnormalized (Sigma^K)^{-1} 1 by the Woodbury identity.
  std::vector<double> raw(k);
  CompensatedSum total;
  for (std::size_t i = 0; i < k; ++i) {
    raw[i] = (1.0 - betas[i] * ratio) / delta2s[i];
    total.add(raw[i]);
  }
  const double norm = total.value();

  LomvSolution sol;
  sol.k = k;
  sol.flipped = sm.flipped();
  sol.weights.assign(p, 0.0);
  const auto perm = sm.perm();
  for (std::size_t i = 0; i < k; ++i) {
    const double w = raw[i] / norm;
    if (!(w > 0.0)) {
      throw NumericalError("active asset at sorted position " +
                           std::to_string(i) +
                           " received a non-positive weight");
    }
    sol.weights[perm[i]] = w;
  }
  sol.active_original_indices.assign(perm.begin(),
                                     perm.begin() + static_cast<long>(k));
  std::sort(sol.active_original_indices.begin(),
            sol.active_original_indices.end());
  sol.threshold_beta = threshold_beta(sol, sm);

  // Variance in sorted order avoids another permutation pass.
  std::vector<double> sorted_w(p, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    sorted_w[i] = raw[i] / norm;
  }
  sol.variance = CovarianceView(sm).quadratic_form(sorted_w);
  return sol;
}

double threshold_beta(const LomvSolution& sol, const SortedModel& sm) {
  if (sol.k >= sm.size()) {
    return kNoThreshold;
  }
  const double c_k = sm.prefix_s1()[sol.k - 1];
  const double b_k = 1.0 / sm.sigma2() + sm.prefix_s2()[sol.k - 1];
  return b_k / c_k;
}

std::vector<double> solve_gmv_longshort(const FactorModel& model) {
  const auto betas = model.betas();
  const auto delta2s = model.delta2s();
  CompensatedSum b;
  CompensatedSum c;
  for (std::size_t i = 0; i < model.size(); ++i) {
    b.add(betas[i] * betas[i] / delta2s[i]);
    c.add(betas[i] / delta2s[i]);
  }
  const double ratio = c.value() / (1.0 / model.sigma2() + b.value());

  std::vector<double> w(model.size());
  CompensatedSum total;
  for (std::size_t i = 0; i < model.size(); ++i) {
    w[i] = (1.0 - betas[i] * ratio) / delta2s[i];
    total.add(w[i]);
  }
  const double norm = total.value();
  for (double& x : w) {
    x /= norm;
  }
  return w;
}

LomvSolution extend_universe(const FactorModel& model,
                             std::span<const double> new_betas,
                             std::span<const double> new_delta2s) {
  std::vector<double> betas(model.betas().begin(), model.betas().end());
  std::vector<double> delta2s(model.delta2s().begin(), model.delta2s().end());
  betas.insert(betas.end(), new_betas.begin(), new_betas.end());
  delta2s.insert(delta2s.end(), new_delta2s.begin(), new_delta2s.end());
  return solve_lomv(
      FactorModel(model.sigma2(), std::move(betas), std::move(delta2s)));
}

double portfolio_variance(const FactorModel& model,
                          std::span<const double> weights) {
  return CovarianceView(model).quadratic_form(weights);
}

}  // namespace lomv

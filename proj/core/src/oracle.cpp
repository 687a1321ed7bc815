#include "lomv/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "lomv/error.hpp"

namespace lomv {

DenseCovariance::DenseCovariance(Eigen::MatrixXd entries)
    : entries_(std::move(entries)) {
  if (entries_.rows() == 0 || entries_.rows() != entries_.cols()) {
    throw InputError("covariance must be a non-empty square matrix");
  }
  const Eigen::Index p = entries_.rows();
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = i + 1; j < p; ++j) {
      const double a = entries_(i, j);
      const double b = entries_(j, i);
      if (!(std::abs(a - b) <=
            1e-12 * std::max({1.0, std::abs(a), std::abs(b)}))) {
        throw InputError("covariance is not symmetric at (" +
                         std::to_string(i) + ", " + std::to_string(j) + ")");
      }
    }
  }
  Eigen::LLT<Eigen::MatrixXd> llt(entries_);
  if (llt.info() != Eigen::Success) {
    throw InputError("covariance is not positive definite");
  }
}

DenseCovariance DenseCovariance::from_factor_model(const FactorModel& model,
                                                   std::size_t cap) {
  const auto flat = CovarianceView(model).materialize(cap);
  const auto p = static_cast<Eigen::Index>(model.size());
  Eigen::MatrixXd m(p, p);
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) {
      m(i, j) = flat[static_cast<std::size_t>(i * p + j)];
    }
  }
  return DenseCovariance(std::move(m));
}

namespace {

struct Candidate {
  std::vector<double> weights;
  double variance;
};

std::optional<Candidate> evaluate_subset(const Eigen::MatrixXd& sigma,
                                         std::span<const std::size_t> subset) {
  const auto k = static_cast<Eigen::Index>(subset.size());
  Eigen::MatrixXd restricted(k, k);
  for (Eigen::Index a = 0; a < k; ++a) {
    for (Eigen::Index b = 0; b < k; ++b) {
      restricted(a, b) =
          sigma(static_cast<Eigen::Index>(subset[static_cast<std::size_t>(a)]),
                static_cast<Eigen::Index>(subset[static_cast<std::size_t>(b)]));
    }
  }
  Eigen::LLT<Eigen::MatrixXd> llt(restricted);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("restricted covariance factorization failed");
  }
  const Eigen::VectorXd x = llt.solve(Eigen::VectorXd::Ones(k));
  const Eigen::VectorXd w = x / x.sum();
  if ((w.array() <= 0.0).any()) {
    return std::nullopt;
  }
  Candidate c;
  c.weights.assign(static_cast<std::size_t>(sigma.rows()), 0.0);
  for (Eigen::Index a = 0; a < k; ++a) {
    c.weights[subset[static_cast<std::size_t>(a)]] = w(a);
  }
  c.variance = w.dot(restricted * w);
  return c;
}

}  // namespace

std::optional<std::vector<double>> oracle_restricted_weights(
    const DenseCovariance& cov, std::span<const std::size_t> subset) {
  if (subset.empty()) {
    throw InputError("subset must be non-empty");
  }
  for (std::size_t idx : subset) {
    if (idx >= cov.size()) {
      throw InputError("subset index " + std::to_string(idx) +
                       " out of range");
    }
  }
  auto c = evaluate_subset(cov.entries(), subset);
  if (!c) {
    return std::nullopt;
  }
  return std::move(c->weights);
}

OracleResult oracle_solve(const DenseCovariance& cov, std::size_t cap) {
  const std::size_t p = cov.size();
  if (p > cap || p >= 63) {
    throw InputError("oracle limited to p <= " + std::to_string(cap) +
                     " (got " + std::to_string(p) + ")");
  }
  OracleResult best;
  best.variance = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> subset;
  subset.reserve(p);
  const std::uint64_t limit = std::uint64_t{1} << p;
  for (std::uint64_t mask = 1; mask < limit; ++mask) {
    subset.clear();
    for (std::size_t i = 0; i < p; ++i) {
      if (mask & (std::uint64_t{1} << i)) {
        subset.push_back(i);
      }
    }
    ++best.candidates_examined;
    auto c = evaluate_subset(cov.entries(), subset);
    if (!c) {
      continue;
    }
    const bool better =
        c->variance < best.variance ||
        (c->variance == best.variance &&
         std::lexicographical_compare(subset.begin(), subset.end(),
                                      best.active_set.begin(),
                                      best.active_set.end()));
    if (better) {
      best.weights = std::move(c->weights);
      best.variance = c->variance;
      best.active_set = subset;
    }
  }
  return best;
}

}  // namespace lomv

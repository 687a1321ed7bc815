#include "lomv/model.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

#include "lomv/error.hpp"

namespace lomv {

FactorModel::FactorModel(double sigma2, std::vector<double> betas,
                         std::vector<double> delta2s)
    : sigma2_(sigma2), betas_(std::move(betas)), delta2s_(std::move(delta2s)) {
  if (betas_.empty()) {
    throw InputError("factor model needs at least one asset");
  }
  if (betas_.size() != delta2s_.size()) {
    throw InputError("beta and delta2 vectors differ in length (" +
                     std::to_string(betas_.size()) + " vs " +
                     std::to_string(delta2s_.size()) + ")");
  }
  if (!std::isfinite(sigma2_) || sigma2_ <= 0.0) {
    throw InputError("sigma2 must be finite and positive");
  }
  bool any_nonzero = false;
  for (std::size_t i = 0; i < betas_.size(); ++i) {
    if (!std::isfinite(betas_[i])) {
      throw InputError("beta at index " + std::to_string(i) +
                       " is not finite");
    }
    if (!std::isfinite(delta2s_[i]) || delta2s_[i] <= 0.0) {
      throw InputError("delta2 at index " + std::to_string(i) +
                       " must be finite and positive");
    }
    any_nonzero = any_nonzero || betas_[i] != 0.0;
  }
  if (!any_nonzero) {
    throw InputError("betas must not all be zero");
  }
}

FactorModel FactorModel::negated() const {
  std::vector<double> flipped(betas_.size());
  std::transform(betas_.begin(), betas_.end(), flipped.begin(),
                 [](double b) { return -b; });
  return FactorModel(sigma2_, std::move(flipped), delta2s_);
}

FactorModel SortedModel::base() const {
  return FactorModel(sigma2_, betas_, delta2s_);
}

SortedModel canonicalize(const FactorModel& model) {
  const std::size_t p = model.size();
  const auto betas = model.betas();
  const auto delta2s = model.delta2s();

  CompensatedSum orientation;
  for (std::size_t i = 0; i < p; ++i) {
    orientation.add(betas[i] / delta2s[i]);
  }

  SortedModel sm;
  sm.sigma2_ = model.sigma2();
  // An exactly zero sum already satisfies the convention.
  sm.flipped_ = orientation.value() < 0.0;
  const double sign = sm.flipped_ ? -1.0 : 1.0;

  sm.perm_.resize(p);
  std::iota(sm.perm_.begin(), sm.perm_.end(), std::size_t{0});
  std::stable_sort(sm.perm_.begin(), sm.perm_.end(),
                   [&](std::size_t a, std::size_t b) {
                     return sign * betas[a] < sign * betas[b];
                   });

  sm.betas_.resize(p);
  sm.delta2s_.resize(p);
  sm.prefix_s1_.resize(p);
  sm.prefix_s2_.resize(p);
  CompensatedSum s1;
  CompensatedSum s2;
  for (std::size_t i = 0; i < p; ++i) {
    const std::size_t src = sm.perm_[i];
    const double b = sign * betas[src] + 0.0;  // no negative zeros
    const double d2 = delta2s[src];
    sm.betas_[i] = b;
    sm.delta2s_[i] = d2;
    s1.add(b / d2);
    s2.add(b * b / d2);
    sm.prefix_s1_[i] = s1.value();
    sm.prefix_s2_[i] = s2.value();
  }
  return sm;
}

double CovarianceView::entry(std::size_t i, std::size_t j) const {
  if (i >= size() || j >= size()) {
    throw std::out_of_range("covariance index (" + std::to_string(i) + ", " +
                            std::to_string(j) + ") out of range for p = " +
                            std::to_string(size()));
  }
  const double factor = sigma2_ * betas_[i] * betas_[j];
  return i == j ? factor + delta2s_[i] : factor;
}

std::vector<double> CovarianceView::multiply(std::span<const double> w) const {
  if (w.size() != size()) {
    throw InputError("weight vector length does not match model size");
  }
  CompensatedSum exposure;
  for (std::size_t i = 0; i < w.size(); ++i) {
    exposure.add(betas_[i] * w[i]);
  }
  const double scaled = sigma2_ * exposure.value();
  std::vector<double> out(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    out[i] = scaled * betas_[i] + delta2s_[i] * w[i];
  }
  return out;
}

double CovarianceView::quadratic_form(std::span<const double> w) const {
  if (w.size() != size()) {
    throw InputError("weight vector length does not match model size");
  }
  CompensatedSum exposure;
  CompensatedSum idio;
  for (std::size_t i = 0; i < w.size(); ++i) {
    exposure.add(betas_[i] * w[i]);
    idio.add(delta2s_[i] * w[i] * w[i]);
  }
  const double e = exposure.value();
  return sigma2_ * e * e + idio.value();
}

std::vector<double> CovarianceView::materialize(std::size_t cap) const {
  const std::size_t p = size();
  if (p > cap) {
    throw InputError("refusing to materialize a " + std::to_string(p) + "x" +
                     std::to_string(p) + " covariance (cap " +
                     std::to_string(cap) + ")");
  }
  std::vector<double> dense(p * p);
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      dense[i * p + j] = sigma2_ * betas_[i] * betas_[j];
    }
    dense[i * p + i] += delta2s_[i];
  }
  return dense;
}

}  // namespace lomv

#include <algorithm>
#include <cmath>

#include "lomv/error.hpp"
#include "lomv/solver.hpp"

namespace lomv {

KktCertificate verify_kkt(const FactorModel& model,
                          std::span<const double> weights, double tolerance) {
  if (weights.size() != model.size()) {
    throw InputError("weight vector length does not match model size");
  }
  const CovarianceView cov(model);
  const std::vector<double> sigma_w = cov.multiply(weights);

  CompensatedSum quad;
  CompensatedSum budget;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    quad.add(weights[i] * sigma_w[i]);
    budget.add(weights[i]);
  }

  KktCertificate cert;
  cert.tolerance = tolerance;
  // From 2 Sigma^K w^K + nu 1 = 0 and 1^T w^K = 1.
  cert.nu = -2.0 * quad.value();
  cert.budget_residual = std::abs(budget.value() - 1.0);
  cert.min_lambda = std::numeric_limits<double>::infinity();
  cert.min_weight = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double lambda = 2.0 * sigma_w[i] + cert.nu;
    const double stationarity = std::abs(2.0 * sigma_w[i] - lambda + cert.nu);
    cert.stationarity_residual =
        std::max(cert.stationarity_residual, stationarity);
    cert.complementarity_residual =
        std::max(cert.complementarity_residual, std::abs(lambda * weights[i]));
    cert.min_lambda = std::min(cert.min_lambda, lambda);
    cert.min_weight = std::min(cert.min_weight, weights[i]);
  }

  const auto finite = [](double x) { return std::isfinite(x); };
  cert.passed = finite(cert.stationarity_residual) &&
                finite(cert.complementarity_residual) &&
                finite(cert.budget_residual) &&
                cert.stationarity_residual <= tolerance &&
                cert.complementarity_residual <= tolerance &&
                cert.budget_residual <= tolerance &&
                cert.min_lambda >= -tolerance && cert.min_weight >= -tolerance;
  return cert;
}

}  // namespace lomv

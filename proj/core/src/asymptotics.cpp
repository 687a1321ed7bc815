#include "lomv/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "lomv/error.hpp"
#include "lomv/model.hpp"

namespace lomv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// A zero of discrete G within this relative distance of an atom is taken to
// sit on the atom. Masses such as 0.05 are not exact in binary, so an exact
// zero at an atom otherwise lands a few ulps to either side.
constexpr double kAtomSnapTolerance = 1e-12;

double g_discrete(const DiscreteBeta& d, double y) {
  CompensatedSum s;
  for (const Atom& a : d.atoms) {
    if (a.location > y) {
      break;
    }
    s.add(a.mass * a.location * (a.location - y));
  }
  return s.value();
}

double g_normal(const NormalBeta& n, double y) {
  // With z = (y - mu)/s, E[b; b <= y] = mu Phi - s phi and
  // E[b^2; b <= y] = (mu^2 + s^2) Phi - s (mu + y) phi.
  const double z = (y - n.mu) / n.s;
  return (n.mu * n.mu + n.s * n.s - n.mu * y) * normal_cdf(z) -
         n.mu * n.s * normal_pdf(z);
}

double g_quadrature(const BetaDistribution& dist, double y) {
  double lo = dist.mean() - kTruncationScales * dist.scale();
  double hi = y;
  auto density = [&dist](double x) -> double {
    if (const NormalBeta* n = dist.as_normal()) {
      return normal_pdf((x - n->mu) / n->s) / n->s;
    }
    const UniformBeta* u = dist.as_uniform();
    return (x >= u->a && x <= u->b) ? 1.0 / (u->b - u->a) : 0.0;
  };
  if (const UniformBeta* u = dist.as_uniform()) {
    lo = std::max(lo, u->a);
    hi = std::min(hi, u->b);
  }
  if (!(hi > lo)) {
    return 0.0;
  }
  auto integrand = [&](double x) { return (x * x - y * x) * density(x); };
  double error = 0.0;
  const double value =
      boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
          integrand, lo, hi, 20, 1e-13, &error);
  if (error > kQuadratureTolerance * std::max(1.0, std::abs(value))) {
    throw NumericalError("G quadrature did not reach its tolerance");
  }
  return value;
}

double find_discrete_zero(const DiscreteBeta& d) {
  // Walk the linear pieces of G(y) = A - B y, A = sum m x^2, B = sum m x
  // over atoms <= y, starting from the piece that contains 0.
  CompensatedSum a_sum;
  CompensatedSum b_sum;
  std::size_t next = 0;
  while (next < d.atoms.size() && d.atoms[next].location <= 0.0) {
    a_sum.add(d.atoms[next].mass * d.atoms[next].location *
              d.atoms[next].location);
    b_sum.add(d.atoms[next].mass * d.atoms[next].location);
    ++next;
  }
  double lo = 0.0;
  while (next < d.atoms.size()) {
    const double hi = d.atoms[next].location;
    const double g_hi = g_discrete(d, hi);
    CompensatedSum scale;
    for (std::size_t i = 0; i <= next; ++i) {
      const double x = d.atoms[i].location;
      scale.add(d.atoms[i].mass * std::abs(x) * (std::abs(x) + hi));
    }
    if (std::abs(g_hi) <= kAtomSnapTolerance * scale.value()) {
      return hi;
    }
    if (g_hi < 0.0) {
      return std::clamp(a_sum.value() / b_sum.value(), lo, hi);
    }
    a_sum.add(d.atoms[next].mass * hi * hi);
    b_sum.add(d.atoms[next].mass * hi);
    lo = hi;
    ++next;
  }
  // Past the last atom B is the mean, positive in the cases that call this.
  return std::max(lo, a_sum.value() / b_sum.value());
}

}  // namespace

std::string to_string(GCurve::Method m) {
  switch (m) {
    case GCurve::Method::kClosedFormDiscrete:
      return "closed-form-discrete";
    case GCurve::Method::kQuadrature:
      return "quadrature";
    case GCurve::Method::kClosedFormNormal:
      return "closed-form-normal";
  }
  return "unknown";
}

std::string to_string(AsymptoticCase c) {
  switch (c) {
    case AsymptoticCase::kNegativeMassPositiveMean:
      return "negative-mass-positive-mean";
    case AsymptoticCase::kNegativeMassZeroMean:
      return "negative-mass-zero-mean";
    case AsymptoticCase::kNonnegativeSupport:
      return "nonnegative-support";
  }
  return "unknown";
}

GCurve::GCurve(BetaDistribution dist)
    : dist_(std::move(dist)), method_(Method::kQuadrature) {
  if (dist_.is_atomic()) {
    method_ = Method::kClosedFormDiscrete;
  } else if (dist_.as_normal() != nullptr) {
    method_ = Method::kClosedFormNormal;
  }
}

GCurve::GCurve(BetaDistribution dist, Method method)
    : dist_(std::move(dist)), method_(method) {
  const bool ok =
      (method == Method::kClosedFormDiscrete && dist_.is_atomic()) ||
      (method == Method::kClosedFormNormal && dist_.as_normal() != nullptr) ||
      (method == Method::kQuadrature && !dist_.is_atomic());
  if (!ok) {
    throw InputError("G method " + to_string(method) +
                     " does not apply to a " + dist_.kind_name() +
                     " distribution");
  }
}

double GCurve::operator()(double y) const {
  if (!std::isfinite(y) || y < 0.0) {
    throw InputError("G is evaluated on finite y >= 0");
  }
  switch (method_) {
    case Method::kClosedFormDiscrete:
      return g_discrete(*dist_.as_discrete(), y);
    case Method::kClosedFormNormal:
      return g_normal(*dist_.as_normal(), y);
    case Method::kQuadrature:
      return g_quadrature(dist_, y);
  }
  throw InputError("unsupported G method");
}

double g_eval(const GCurve& curve, double y) { return curve(y); }

double find_g_zero(const GCurve& curve) {
  const BetaDistribution& dist = curve.distribution();
  if (!(curve(0.0) > 0.0)) {
    return 0.0;
  }
  if (const DiscreteBeta* d = dist.as_discrete()) {
    return find_discrete_zero(*d);
  }
  const double mean = dist.mean();
  if (!(mean > 0.0)) {
    throw InputError("G has no zero unless the mean is positive");
  }
  // The zero lies below E[beta^2]/E[beta] under the moment hypotheses; start
  // there and widen if needed.
  double hi = std::max(dist.second_moment() / mean, 1e-3);
  while (curve(hi) > 0.0) {
    hi *= 2.0;
    if (!std::isfinite(hi)) {
      throw NumericalError("failed to bracket the zero of G");
    }
  }
  double lo = 0.0;
  while (hi - lo > kRootWidth) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) {
      break;
    }
    if (curve(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo + 0.5 * (hi - lo);
}

AsymptoticReport classify_and_solve(const BetaDistribution& input) {
  AsymptoticReport rep;
  BetaDistribution dist = input;
  double mean = dist.mean();
  if (mean < -kZeroMeanTolerance) {
    dist = dist.negated();
    mean = -mean;
    rep.flipped = true;
  }
  rep.mean = mean;
  rep.prob_negative = dist.cdf_left(0.0);

  if (rep.prob_negative > 0.0) {
    if (std::abs(mean) <= kZeroMeanTolerance) {
      rep.case_label = AsymptoticCase::kNegativeMassZeroMean;
      rep.beta_star = kInf;
      rep.limit = 1.0;
      rep.liminf = rep.limsup = 1.0;
      rep.f_beta_star = rep.f_beta_star_left = 1.0;
      return rep;
    }
    rep.case_label = AsymptoticCase::kNegativeMassPositiveMean;
    rep.beta_star = find_g_zero(GCurve(dist));
    rep.f_beta_star = dist.cdf(rep.beta_star);
    rep.atom_at_beta_star = dist.atom_mass(rep.beta_star);
    rep.f_beta_star_left = rep.atom_at_beta_star > 0.0
                               ? rep.f_beta_star - rep.atom_at_beta_star
                               : rep.f_beta_star;
    rep.liminf = rep.f_beta_star_left;
    rep.limsup = rep.f_beta_star;
    if (rep.atom_at_beta_star == 0.0) {
      rep.limit = rep.f_beta_star;
    }
    return rep;
  }

  if (!(mean > kZeroMeanTolerance)) {
    // Non-negative support with zero mean is a point mass at zero.
    throw InputError("distribution is concentrated at zero");
  }
  rep.case_label = AsymptoticCase::kNonnegativeSupport;
  rep.beta_star = std::max(dist.support_lower(), 0.0);
  rep.atom_at_beta_star = dist.atom_mass(rep.beta_star);
  rep.f_beta_star = dist.cdf(rep.beta_star);
  rep.f_beta_star_left = dist.cdf_left(rep.beta_star);
  rep.limit = rep.atom_at_beta_star;
  rep.liminf = rep.limsup = rep.atom_at_beta_star;
  return rep;
}

double ThetaBound::theta() const {
  const double k = cond_neg_second_k;
  return 27.0 * (k + second_moment_c * std::sqrt(k) / mu) * concentration_m *
         concentration_m;
}

double ThetaBound::bound(double epsilon) const {
  return epsilon + std::cbrt(theta()) * std::cbrt(epsilon);
}

double theta_bound(const ThetaBound& params, double epsilon) {
  const auto positive_finite = [](double x) {
    return std::isfinite(x) && x > 0.0;
  };
  if (!positive_finite(params.mu) || !positive_finite(params.second_moment_c) ||
      !positive_finite(params.cond_neg_second_k) ||
      !positive_finite(params.concentration_m)) {
    throw InputError("theta bound constants must be finite and positive");
  }
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw InputError("epsilon must lie in (0, 1)");
  }
  return params.bound(epsilon);
}

ThetaBound normal_theta_constants(double mu, double s) {
  if (!(mu > 0.0) || !(s > 0.0)) {
    throw InputError("normal theta constants need mu > 0 and s > 0");
  }
  const auto dist = BetaDistribution::normal(mu, s);
  const double mass = dist.cdf(0.0);
  if (!(mass > 0.0)) {
    throw InputError("no mass on (-inf, 0]; conditional moment undefined");
  }
  ThetaBound tb;
  tb.mu = mu;
  tb.second_moment_c = mu * mu + s * s;
  tb.cond_neg_second_k = dist.negative_tail_second_moment() / mass;
  tb.concentration_m = dist.density_sup_nonnegative();
  return tb;
}

std::vector<BoundCheck> verify_bound_on_family(
    std::span<const BetaDistribution> dists, const ThetaBound& params) {
  std::vector<BoundCheck> out;
  out.reserve(dists.size());
  for (const BetaDistribution& dist : dists) {
    BoundCheck check;
    check.epsilon = dist.cdf(0.0);
    if (!(check.epsilon > 0.0)) {
      check.skipped = true;
      check.passed = true;
      out.push_back(check);
      continue;
    }
    check.y_star = find_g_zero(GCurve(dist));
    check.f_y_star = dist.cdf(check.y_star);
    check.bound = theta_bound(params, check.epsilon);
    check.margin = check.bound - check.f_y_star;
    check.passed = check.f_y_star <= check.bound;
    out.push_back(check);
  }
  return out;
}

}  // namespace lomv

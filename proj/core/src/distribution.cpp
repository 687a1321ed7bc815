#include "lomv/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "lomv/error.hpp"
#include "lomv/model.hpp"

namespace lomv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::vector<double> cumulative_masses(const DiscreteBeta& d) {
  std::vector<double> cum;
  cum.reserve(d.atoms.size());
  CompensatedSum acc;
  for (const Atom& a : d.atoms) {
    acc.add(a.mass);
    cum.push_back(acc.value());
  }
  return cum;
}

}  // namespace

double uniform01(std::mt19937_64& rng) noexcept {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double normal_cdf(double z) noexcept {
  return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

double normal_pdf(double z) noexcept {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

BetaDistribution BetaDistribution::normal(double mu, double s) {
  if (!std::isfinite(mu) || !std::isfinite(s) || s <= 0.0) {
    throw InputError("normal distribution needs finite mu and s > 0");
  }
  return BetaDistribution(Kind::kNormal, NormalBeta{mu, s});
}

BetaDistribution BetaDistribution::discrete(std::vector<Atom> atoms) {
  if (atoms.empty()) {
    throw InputError("discrete distribution needs at least one atom");
  }
  CompensatedSum total;
  for (const Atom& a : atoms) {
    if (!std::isfinite(a.location) || !std::isfinite(a.mass) ||
        a.mass <= 0.0) {
      throw InputError("atoms need finite locations and positive masses");
    }
    total.add(a.mass);
  }
  if (std::abs(total.value() - 1.0) > 1e-12) {
    throw InputError("atom masses must sum to 1 (got " +
                     std::to_string(total.value()) + ")");
  }
  std::stable_sort(atoms.begin(), atoms.end(),
                   [](const Atom& x, const Atom& y) {
                     return x.location < y.location;
                   });
  std::vector<Atom> merged;
  for (const Atom& a : atoms) {
    if (!merged.empty() && merged.back().location == a.location) {
      merged.back().mass += a.mass;
    } else {
      merged.push_back(a);
    }
  }
  BetaDistribution d(Kind::kDiscrete, DiscreteBeta{std::move(merged)});
  d.cumulative_ = cumulative_masses(*d.as_discrete());
  return d;
}

BetaDistribution BetaDistribution::uniform(double a, double b) {
  if (!std::isfinite(a) || !std::isfinite(b) || !(a < b)) {
    throw InputError("uniform distribution needs finite a < b");
  }
  return BetaDistribution(Kind::kUniform, UniformBeta{a, b});
}

BetaDistribution BetaDistribution::empirical(std::span<const double> samples) {
  if (samples.empty()) {
    throw InputError("empirical distribution needs at least one sample");
  }
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double unit = 1.0 / static_cast<double>(sorted.size());
  std::vector<Atom> atoms;
  for (double x : sorted) {
    if (!std::isfinite(x)) {
      throw InputError("empirical samples must be finite");
    }
    if (!atoms.empty() && atoms.back().location == x) {
      atoms.back().mass += unit;
    } else {
      atoms.push_back({x, unit});
    }
  }
  BetaDistribution d(Kind::kEmpirical, DiscreteBeta{std::move(atoms)});
  d.cumulative_ = cumulative_masses(*d.as_discrete());
  return d;
}

std::string BetaDistribution::kind_name() const {
  switch (kind_) {
    case Kind::kNormal:
      return "normal";
    case Kind::kDiscrete:
      return "discrete";
    case Kind::kUniform:
      return "uniform";
    case Kind::kEmpirical:
      return "empirical";
  }
  return "unknown";
}

double BetaDistribution::cdf(double x) const {
  return std::visit(
      Overloaded{
          [x](const NormalBeta& n) { return normal_cdf((x - n.mu) / n.s); },
          [this, x](const DiscreteBeta& d) {
            const auto it = std::upper_bound(
                d.atoms.begin(), d.atoms.end(), x,
                [](double v, const Atom& a) { return v < a.location; });
            if (it == d.atoms.begin()) {
              return 0.0;
            }
            const auto idx = static_cast<std::size_t>(it - d.atoms.begin());
            return idx == d.atoms.size() ? 1.0 : cumulative_[idx - 1];
          },
          [x](const UniformBeta& u) {
            return std::clamp((x - u.a) / (u.b - u.a), 0.0, 1.0);
          }},
      repr_);
}

double BetaDistribution::cdf_left(double x) const {
  return is_atomic() ? cdf(x) - atom_mass(x) : cdf(x);
}

double BetaDistribution::atom_mass(double x) const {
  const DiscreteBeta* d = as_discrete();
  if (d == nullptr) {
    return 0.0;
  }
  const auto it = std::lower_bound(
      d->atoms.begin(), d->atoms.end(), x,
      [](const Atom& a, double v) { return a.location < v; });
  return it != d->atoms.end() && it->location == x ? it->mass : 0.0;
}

double BetaDistribution::mean() const {
  return std::visit(Overloaded{[](const NormalBeta& n) { return n.mu; },
                               [](const DiscreteBeta& d) {
                                 CompensatedSum s;
                                 for (const Atom& a : d.atoms) {
                                   s.add(a.mass * a.location);
                                 }
                                 return s.value();
                               },
                               [](const UniformBeta& u) {
                                 return 0.5 * (u.a + u.b);
                               }},
                    repr_);
}

double BetaDistribution::second_moment() const {
  return std::visit(
      Overloaded{[](const NormalBeta& n) { return n.mu * n.mu + n.s * n.s; },
                 [](const DiscreteBeta& d) {
                   CompensatedSum s;
                   for (const Atom& a : d.atoms) {
                     s.add(a.mass * a.location * a.location);
                   }
                   return s.value();
                 },
                 [](const UniformBeta& u) {
                   return (u.a * u.a + u.a * u.b + u.b * u.b) / 3.0;
                 }},
      repr_);
}

double BetaDistribution::negative_tail_second_moment() const {
  return std::visit(
      Overloaded{[](const NormalBeta& n) {
                   // E[X^2; X <= 0] with X = mu + s Z and z0 = -mu/s.
                   const double z0 = -n.mu / n.s;
                   return (n.mu * n.mu + n.s * n.s) * normal_cdf(z0) -
                          n.mu * n.s * normal_pdf(z0);
                 },
                 [](const DiscreteBeta& d) {
                   CompensatedSum s;
                   for (const Atom& a : d.atoms) {
                     if (a.location <= 0.0) {
                       s.add(a.mass * a.location * a.location);
                     }
                   }
                   return s.value();
                 },
                 [](const UniformBeta& u) {
                   const double hi = std::min(u.b, 0.0);
                   if (hi <= u.a) {
                     return 0.0;
                   }
                   return (hi * hi * hi - u.a * u.a * u.a) / (3.0 * (u.b - u.a));
                 }},
      repr_);
}

double BetaDistribution::support_lower() const {
  return std::visit(
      Overloaded{[](const NormalBeta&) { return -kInf; },
                 [](const DiscreteBeta& d) { return d.atoms.front().location; },
                 [](const UniformBeta& u) { return u.a; }},
      repr_);
}

double BetaDistribution::scale() const {
  const double var = second_moment() - mean() * mean();
  return std::sqrt(std::max(var, 0.0));
}

double BetaDistribution::density_sup_nonnegative() const {
  return std::visit(
      Overloaded{[](const NormalBeta& n) {
                   // The density peaks at mu; on [0, inf) that is reachable
                   // only when mu >= 0.
                   const double z = n.mu >= 0.0 ? 0.0 : n.mu / n.s;
                   return normal_pdf(z) / n.s;
                 },
                 [](const DiscreteBeta& d) {
                   const bool atom_on_nonnegative =
                       d.atoms.back().location >= 0.0;
                   return atom_on_nonnegative ? kInf : 0.0;
                 },
                 [](const UniformBeta& u) {
                   return u.b >= 0.0 ? 1.0 / (u.b - u.a) : 0.0;
                 }},
      repr_);
}

BetaDistribution BetaDistribution::negated() const {
  switch (kind_) {
    case Kind::kNormal: {
      const auto& n = std::get<NormalBeta>(repr_);
      return normal(-n.mu, n.s);
    }
    case Kind::kUniform: {
      const auto& u = std::get<UniformBeta>(repr_);
      return uniform(-u.b, -u.a);
    }
    case Kind::kDiscrete:
    case Kind::kEmpirical: {
      std::vector<Atom> atoms = std::get<DiscreteBeta>(repr_).atoms;
      std::reverse(atoms.begin(), atoms.end());
      for (Atom& a : atoms) {
        a.location = -a.location + 0.0;
      }
      BetaDistribution d(kind_, DiscreteBeta{std::move(atoms)});
      d.cumulative_ = cumulative_masses(*d.as_discrete());
      return d;
    }
  }
  throw InputError("unsupported distribution kind");
}

double BetaDistribution::sample(std::mt19937_64& rng) const {
  return sample_n(rng, 1).front();
}

std::vector<double> BetaDistribution::sample_n(std::mt19937_64& rng,
                                               std::size_t n) const {
  std::vector<double> out(n);
  std::visit(
      Overloaded{
          [&](const NormalBeta& nb) {
            std::normal_distribution<double> gauss(nb.mu, nb.s);
            for (double& x : out) {
              x = gauss(rng);
            }
          },
          [&](const DiscreteBeta& d) {
            for (double& x : out) {
              const double u = uniform01(rng);
              const auto it =
                  std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
              const auto idx = std::min(
                  static_cast<std::size_t>(it - cumulative_.begin()),
                  d.atoms.size() - 1);
              x = d.atoms[idx].location;
            }
          },
          [&](const UniformBeta& u) {
            for (double& x : out) {
              x = u.a + (u.b - u.a) * uniform01(rng);
            }
          }},
      repr_);
  return out;
}

}  // namespace lomv

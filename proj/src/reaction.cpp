#include "kpplab/reaction.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kpplab/error.hpp"

namespace kpplab {

Reaction::Reaction(GrowthFamily family, double r0, double shape, double amplitude, double radius)
    : family_(family), r0_(r0), shape_(shape), amplitude_(amplitude), radius_(radius) {
  if (!std::isfinite(r0) || !std::isfinite(shape) || !std::isfinite(amplitude) ||
      !std::isfinite(radius))
    throw Error(ErrorKind::invalid_argument, "reaction parameters must be finite");
  if (!(radius > 0.0)) throw Error(ErrorKind::invalid_argument, "perturbation radius must be positive");
  if (!(shape > 0.0))
    throw Error(ErrorKind::invalid_argument, "decay coefficient / capacity must be positive");
}

Reaction Reaction::linear(double r0, double b, double amplitude, double radius) {
  return Reaction(GrowthFamily::linear, r0, b, amplitude, radius);
}

Reaction Reaction::logistic(double r0, double capacity, double amplitude, double radius) {
  return Reaction(GrowthFamily::logistic, r0, capacity, amplitude, radius);
}

double Reaction::base(double u) const {
  switch (family_) {
    case GrowthFamily::linear: return r0_ - shape_ * u;
    case GrowthFamily::logistic: return r0_ * (1.0 - u / shape_);
  }
  return 0.0;
}

double Reaction::base_slope() const {
  return family_ == GrowthFamily::linear ? -shape_ : -r0_ / shape_;
}

double Reaction::bump(double norm) const {
  const double s = norm / radius_;
  if (s >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - s * s));
}

double Reaction::operator()(const Point& x, double u) const {
  return at_norm(std::hypot(x[0], x[1]), u);
}

double Reaction::max_rate_at_zero() const { return r0_ + std::max(amplitude_, 0.0); }
double Reaction::min_rate_at_zero() const { return r0_ + std::min(amplitude_, 0.0); }

double Reaction::beta0() const {
  const double slope = base_slope();
  const double top = max_rate_at_zero();
  if (!(top > 0.0)) return 1.0;
  return 1.25 * top / -slope;
}

double Reaction::max_abs_growth(double u_max) const {
  const double s = base_slope() * u_max;
  const double lo = min_rate_at_zero(), hi = max_rate_at_zero();
  return std::max({std::abs(lo), std::abs(hi), std::abs(lo + s), std::abs(hi + s)});
}

Reaction Reaction::with_amplitude(double amplitude) const {
  return Reaction(family_, r0_, shape_, amplitude, radius_);
}

Field perturbation_field(const Reaction& reaction, const Habitat& habitat) {
  Field p(habitat);
  for (std::size_t i = 0; i < habitat.size(); ++i) p[i] = reaction.perturbation(habitat.norm(i));
  return p;
}

double positive_equilibrium(const Reaction& reaction) {
  double lo = 0.0, hi = reaction.beta0();
  if (!(reaction.base(lo) > 0.0) || !(reaction.base(hi) < 0.0) || !std::isfinite(hi))
    throw Error(ErrorKind::no_positive_equilibrium,
                "f0 has no sign change on [0, " + std::to_string(hi) + "]");
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (reaction.base(mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

KppReport check_kpp_hypotheses(const Reaction& reaction, const Habitat& habitat) {
  KppReport report;
  report.beta0 = reaction.beta0();
  report.u0_star = positive_equilibrium(reaction);

  constexpr double du = 1e-2;
  const int n_u = static_cast<int>(std::ceil(2.0 * report.beta0 / du));

  bool h1 = true, h2 = true;
  for (std::size_t i = 0; i < habitat.size(); ++i) {
    const Point x = habitat.point(i);
    const bool inside = std::hypot(x[0], x[1]) < reaction.radius();
    if (reaction(x, report.beta0) >= 0.0) h1 = false;
    if (inside) {
      double prev = reaction(x, 0.0);
      for (int k = 1; k <= n_u; ++k) {
        const double cur = reaction(x, k * du);
        if (!(cur < prev)) h1 = false;
        prev = cur;
      }
    } else {
      for (int k = 0; k <= n_u; ++k) {
        const double u = k * du;
        if (reaction(x, u) != reaction.base(u)) h2 = false;
      }
    }
  }
  // Outside the perturbation f is f0, so one decreasing check of f0 covers it.
  double prev = reaction.base(0.0);
  for (int k = 1; k <= n_u; ++k) {
    const double cur = reaction.base(k * du);
    if (!(cur < prev)) h1 = false;
    prev = cur;
  }
  report.h1_ok = h1;
  report.h2_ok = h2;
  return report;
}

Field make_front_initial(const Habitat& habitat, const Direction& xi, double sigma0) {
  if (!(sigma0 > 0.0)) throw Error(ErrorKind::invalid_argument, "sigma0 must be positive");
  return Field::from_function(habitat, [&](const Point& x) {
    const double s = xi.dot(x);
    if (s <= 0.0) return sigma0;
    if (s >= 1.0) return 0.0;
    return sigma0 * (1.0 - s);
  });
}

namespace {
double plateau(double dist, double r, double sigma) {
  if (dist <= r) return sigma;
  if (dist >= r + 1.0) return 0.0;
  return sigma * (1.0 - (dist - r));
}
}  // namespace

Field make_compact_initial(const Habitat& habitat, double r, double sigma) {
  if (!(r > 0.0) || !(sigma > 0.0))
    throw Error(ErrorKind::invalid_argument, "radius and height must be positive");
  if (r + 1.0 >= habitat.half_extent())
    throw Error(ErrorKind::domain_too_small, "plateau radius + 1 must be below the half extent");
  return Field::from_function(habitat, [&](const Point& x) {
    return plateau(std::hypot(x[0], x[1]), r, sigma);
  });
}

Field make_strip_initial(const Habitat& habitat, const Direction& xi, double r, double sigma) {
  if (!(r > 0.0) || !(sigma > 0.0))
    throw Error(ErrorKind::invalid_argument, "strip half width and height must be positive");
  if (r + 1.0 >= habitat.half_extent())
    throw Error(ErrorKind::domain_too_small, "strip half width + 1 must be below the half extent");
  return Field::from_function(habitat, [&](const Point& x) {
    return plateau(std::abs(xi.dot(x)), r, sigma);
  });
}

}  // namespace kpplab

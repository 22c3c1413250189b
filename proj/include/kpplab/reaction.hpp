#pragma once

#include "kpplab/habitat.hpp"

namespace kpplab {

enum class GrowthFamily {
  linear,    // f0(u) = r0 - b u
  logistic,  // f0(u) = r0 (1 - u / K)
};

// Growth rate f(x,u) = f0(u) + A * bump(|x|), where bump is the smooth
// mollifier exp(1 - 1/(1 - (|x|/L0)^2)) on |x| < L0 and exactly 0 outside.
class Reaction {
 public:
  static Reaction linear(double r0, double b, double amplitude = 0.0, double radius = 1.0);
  static Reaction logistic(double r0, double capacity, double amplitude = 0.0,
                           double radius = 1.0);

  GrowthFamily family() const { return family_; }
  double r0() const { return r0_; }
  // b for the linear family, K for the logistic family.
  double shape() const { return shape_; }
  double amplitude() const { return amplitude_; }
  double radius() const { return radius_; }

  double base(double u) const;
  // d f0 / du (constant for both families).
  double base_slope() const;
  double bump(double norm) const;
  double perturbation(double norm) const { return amplitude_ * bump(norm); }

  double operator()(const Point& x, double u) const;
  double at_norm(double norm, double u) const { return base(u) + perturbation(norm); }

  // sup_x f(x,0) and inf_x f(x,0).
  double max_rate_at_zero() const;
  double min_rate_at_zero() const;
  // A level beyond which f(x,u) < 0 for every x.
  double beta0() const;
  // max |f(x,u)| over u in [0, u_max] and all x.
  double max_abs_growth(double u_max) const;

  // Same base growth, amplitude replaced.
  Reaction with_amplitude(double amplitude) const;
  Reaction homogeneous() const { return with_amplitude(0.0); }

 private:
  Reaction(GrowthFamily family, double r0, double shape, double amplitude, double radius);

  GrowthFamily family_;
  double r0_;
  double shape_;
  double amplitude_;
  double radius_;
};

// Pointwise perturbation A*bump(|x|) sampled on the habitat.
Field perturbation_field(const Reaction& reaction, const Habitat& habitat);

struct KppReport {
  bool h1_ok = false;  // d_u f < 0 and f(., beta0) < 0 on the sample grid
  bool h2_ok = false;  // f(x,u) == f0(u) exactly for |x| >= L0
  double beta0 = 0.0;
  double u0_star = 0.0;  // positive root of f0
};

// Sample grid: u in [0, 2 beta0] at steps of 1e-2; x over every habitat point
// with |x| < L0 plus every point outside (the H2 check is exhaustive).
// Throws no_positive_equilibrium when f0 has no sign change on [0, beta0].
KppReport check_kpp_hypotheses(const Reaction& reaction, const Habitat& habitat);

// Positive root of f0 by bisection to 1e-12.
double positive_equilibrium(const Reaction& reaction);

// sigma0 on x.xi <= 0, linear ramp to zero on [0, 1], zero beyond.
Field make_front_initial(const Habitat& habitat, const Direction& xi, double sigma0);
// sigma on |x| <= r, zero for |x| >= r + 1, linear in between.
Field make_compact_initial(const Habitat& habitat, double r, double sigma);
// sigma on |x.xi| <= r, zero for |x.xi| >= r + 1, linear in between.
Field make_strip_initial(const Habitat& habitat, const Direction& xi, double r, double sigma);

}  // namespace kpplab

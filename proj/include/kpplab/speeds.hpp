#pragma once

#include <functional>
#include <optional>

#include "kpplab/eigen.hpp"
#include "kpplab/reaction.hpp"

namespace kpplab {

// mu -> lambda(mu, xi) for one dispersal kind and direction.
struct DispersionRelation {
  std::function<double(double)> lambda;
  Direction xi;
  DispersalKind kind = DispersalKind::random;
  double mu_max = 20.0;
};

struct SpeedResult {
  double c_star = 0.0;
  double mu_star = 0.0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  int evaluations = 0;
};

// Closed-form relation lambda(mu) = lambda_closed_form(op, mu, xi, r).
DispersionRelation closed_form_relation(const DispersalOp& op, const Direction& xi, double r);
// Relation backed by principal_eigen on the cell of coefficient a. mu_max is
// 5 (and at most 1/h for random dispersal); power iteration slows down past it.
DispersionRelation eigen_relation(const DispersalOp& op, const Direction& xi,
                                  const PeriodicCoefficient& a);

// inf_{mu > 0} lambda(mu)/mu: a 60-point log-spaced scan of [1e-3, mu_max]
// brackets the minimizer, golden-section search refines it to relative
// tolerance tol in mu.
SpeedResult minimize_speed(const DispersionRelation& rel, double tol = 1e-10);

// Speed of the homogeneous limit equation, built at r = f0(0). The
// localized perturbation does not enter.
SpeedResult theoretical_speed(const DispersalOp& op, const Reaction& reaction, const Direction& xi);

}  // namespace kpplab

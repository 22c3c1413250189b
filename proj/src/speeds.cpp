#include "kpplab/speeds.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "kpplab/error.hpp"

namespace kpplab {

DispersionRelation closed_form_relation(const DispersalOp& op, const Direction& xi, double r) {
  return DispersionRelation{[op, xi, r](double mu) { return lambda_closed_form(op, mu, xi, r); }, xi,
                            op.kind()};
}

DispersionRelation eigen_relation(const DispersalOp& op, const Direction& xi,
                                  const PeriodicCoefficient& a) {
  double mu_max = 5.0;
  if (op.kind() == DispersalKind::random) mu_max = std::min(mu_max, 1.0 / a.spacing());
  return DispersionRelation{
      [op, xi, a](double mu) { return principal_eigen(CellOperator(op, mu, xi, a)).lambda; }, xi,
      op.kind(), mu_max};
}

SpeedResult minimize_speed(const DispersionRelation& rel, double tol) {
  SpeedResult res;
  auto speed = [&](double mu) {
    ++res.evaluations;
    const double v = rel.lambda(mu);
    if (!std::isfinite(v)) throw Error(ErrorKind::invalid_argument, "dispersion relation not finite");
    return v / mu;
  };

  if (!(rel.lambda(1e-6) > 0.0))
    throw Error(ErrorKind::invalid_argument, "lambda(0+) must be positive for a spreading speed");
  ++res.evaluations;

  constexpr int kScan = 60;
  const double lo = 1e-3, hi = rel.mu_max;
  std::vector<double> mus(kScan), vals(kScan);
  int best = 0;
  for (int k = 0; k < kScan; ++k) {
    mus[k] = lo * std::pow(hi / lo, static_cast<double>(k) / (kScan - 1));
    vals[k] = speed(mus[k]);
    if (vals[k] < vals[best]) best = k;
  }
  if (best == kScan - 1) {
    std::ostringstream msg;
    msg << "lambda/mu still decreasing at mu_max = " << hi;
    throw Error(ErrorKind::bracket_edge, msg.str());
  }
  if (best == 0) throw Error(ErrorKind::bracket_edge, "minimizer below the scan start 1e-3");

  // Golden-section search on [mus[best-1], mus[best+1]].
  double a = mus[best - 1], b = mus[best + 1];
  res.bracket_lo = a;
  res.bracket_hi = b;
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - g * (b - a), x2 = a + g * (b - a);
  double f1 = speed(x1), f2 = speed(x2);
  while ((b - a) > tol * 0.5 * (a + b)) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - g * (b - a);
      f1 = speed(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (b - a);
      f2 = speed(x2);
    }
  }
  if (f1 < f2) {
    res.mu_star = x1;
    res.c_star = f1;
  } else {
    res.mu_star = x2;
    res.c_star = f2;
  }
  if (vals[best] < res.c_star) {
    res.mu_star = mus[best];
    res.c_star = vals[best];
  }
  return res;
}

SpeedResult theoretical_speed(const DispersalOp& op, const Reaction& reaction, const Direction& xi) {
  return minimize_speed(closed_form_relation(op, xi, reaction.base(0.0)));
}

}  // namespace kpplab

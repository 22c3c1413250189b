#include "kpplab/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kpplab/error.hpp"

namespace kpplab {

const char* to_string(Scheme scheme) {
  return scheme == Scheme::rk4 ? "rk4" : "explicit-euler";
}

const char* to_string(CheckStatus status) {
  switch (status) {
    case CheckStatus::passed: return "pass";
    case CheckStatus::failed: return "fail";
    case CheckStatus::input_error: return "input-error";
  }
  return "?";
}

double stable_step_bound(const DispersalOp& op, const Habitat& habitat, const Reaction& reaction,
                         double u_max) {
  constexpr double safety = 0.25;
  switch (op.kind()) {
    case DispersalKind::random: {
      const double h = habitat.spacing();
      return h * h / (2.0 * habitat.dim() * (1.0 + safety));
    }
    case DispersalKind::nonlocal:
      return 0.25 / (1.0 + reaction.max_abs_growth(u_max) + 1.0);
    case DispersalKind::discrete:
      return 0.25 / (op.lattice_weights().total() + reaction.max_abs_growth(u_max) + 1.0);
  }
  return 0.0;
}

double stable_step_bound(const DispersalOp& op, const Reaction& reaction, const Field& u0) {
  const double u_max = std::max(u0.max(), reaction.beta0()) + 1.0;
  return stable_step_bound(op, u0.habitat, reaction, u_max);
}

Integrator::Integrator(const DispersalOp& op, const Reaction& reaction, const Field& u0, double dt,
                       Scheme scheme)
    : dispersal_(op, u0.habitat),
      reaction_(reaction),
      perturbation_(perturbation_field(reaction, u0.habitat)),
      state_(u0),
      dt_(dt),
      scheme_(scheme) {
  if (!u0.all_finite()) throw Error(ErrorKind::invalid_argument, "initial data must be finite");
  if (u0.min() < 0.0) throw Error(ErrorKind::invalid_argument, "initial data must be nonnegative");
  const double bound = stable_step_bound(op, reaction, u0);
  if (!(dt > 0.0) || dt > bound * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "dt = " << dt << " exceeds the stability bound " << bound;
    throw Error(ErrorKind::unstable_step, msg.str());
  }
  const std::size_t n = u0.size();
  k1_.resize(n);
  tmp_.resize(n);
  if (scheme_ == Scheme::rk4) {
    k2_.resize(n);
    k3_.resize(n);
    k4_.resize(n);
  }
}

void Integrator::rhs(std::span<const double> u, std::span<double> out) const {
  dispersal_.apply(u, out);
  const double* p = perturbation_.values.data();
  for (std::size_t i = 0; i < u.size(); ++i)
    out[i] += u[i] * (reaction_.base(u[i]) + p[i]);
}

void Integrator::step() {
  std::vector<double>& u = state_.values;
  const std::size_t n = u.size();
  const double dt = dt_;
  if (scheme_ == Scheme::explicit_euler) {
    rhs(u, k1_);
    for (std::size_t i = 0; i < n; ++i) u[i] += dt * k1_[i];
  } else {
    rhs(u, k1_);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = u[i] + 0.5 * dt * k1_[i];
    rhs(tmp_, k2_);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = u[i] + 0.5 * dt * k2_[i];
    rhs(tmp_, k3_);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = u[i] + dt * k3_[i];
    rhs(tmp_, k4_);
    const double w = dt / 6.0;
    for (std::size_t i = 0; i < n; ++i)
      u[i] += w * (k1_[i] + 2.0 * k2_[i] + 2.0 * k3_[i] + k4_[i]);
  }
  ++steps_;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = u[i];
    if (!std::isfinite(v)) {
      std::ostringstream msg;
      msg << "non-finite value at t = " << time();
      throw Error(ErrorKind::diverged, msg.str());
    }
    if (v < 0.0) {
      if (v < -1e-14) ++clips_;
      u[i] = 0.0;
    }
  }
}

void Integrator::advance(std::size_t n_steps) {
  for (std::size_t k = 0; k < n_steps; ++k) step();
}

Trajectory evolve(const DispersalOp& op, const Reaction& reaction, const Field& u0, double T,
                  double dt, std::size_t record_every, Scheme scheme) {
  if (!(T >= 0.0)) throw Error(ErrorKind::invalid_argument, "final time must be nonnegative");
  if (record_every == 0) throw Error(ErrorKind::invalid_argument, "record_every must be positive");
  Integrator integ(op, reaction, u0, dt, scheme);
  const auto total = static_cast<std::size_t>(std::ceil(T / dt - 1e-9));

  Trajectory traj{u0.habitat, {0.0}, {u0}, dt, scheme, 0};
  for (std::size_t k = 1; k <= total; ++k) {
    integ.step();
    if (k % record_every == 0 || k == total) {
      traj.times.push_back(integ.time());
      traj.snapshots.push_back(integ.state());
    }
  }
  traj.clip_count = integ.clip_count();
  return traj;
}

double stationary_residual(const DispersalOp& op, const Reaction& reaction, const Field& u) {
  BoundDispersal disp(op, u.habitat);
  Field out(u.habitat);
  disp.apply(u.view(), out.view());
  double r = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const Point x = u.habitat.point(i);
    r = std::max(r, std::abs(out[i] + u[i] * reaction(x, u[i])));
  }
  return r;
}

namespace {
void check_same_sampling(const Trajectory& a, const Trajectory& b) {
  if (!(a.habitat == b.habitat)) throw Error(ErrorKind::mismatched_sampling, "different habitats");
  if (a.times.size() != b.times.size())
    throw Error(ErrorKind::mismatched_sampling, "different number of records");
  for (std::size_t k = 0; k < a.times.size(); ++k)
    if (std::abs(a.times[k] - b.times[k]) > 1e-12 * std::max(1.0, a.times[k]))
      throw Error(ErrorKind::mismatched_sampling, "record times differ");
}

std::size_t centre_index(const Habitat& h) {
  const auto mid = static_cast<std::size_t>(h.axis_points() / 2);
  return h.dim() == 2 ? mid * h.axis_points() + mid : mid;
}
}  // namespace

ComparisonReport check_comparison(const Trajectory& lower, const Trajectory& upper) {
  check_same_sampling(lower, upper);
  ComparisonReport rep;
  bool gap_taken = false;
  const std::size_t c = centre_index(lower.habitat);
  for (std::size_t k = 0; k < lower.times.size(); ++k) {
    const auto& a = lower.snapshots[k].values;
    const auto& b = upper.snapshots[k].values;
    for (std::size_t i = 0; i < a.size(); ++i) rep.max_violation = std::max(rep.max_violation, a[i] - b[i]);
    if (!gap_taken && lower.times[k] >= 1.0) {
      rep.interior_gap = b[c] - a[c];
      gap_taken = true;
    }
  }
  if (!gap_taken) rep.interior_gap = upper.final()[c] - lower.final()[c];
  rep.passed = rep.max_violation <= kOrderTolerance;
  return rep;
}

double part_metric(const Field& u, const Field& v) {
  if (u.size() != v.size()) throw Error(ErrorKind::mismatched_sampling, "field sizes differ");
  if (!(u.min() > 0.0) || !(v.min() > 0.0))
    throw Error(ErrorKind::not_positive, "part metric needs strictly positive fields");
  double m = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) m = std::max(m, std::abs(std::log(u[i]) - std::log(v[i])));
  return m;
}

PartMetricReport part_metric_sequence(const Trajectory& a, const Trajectory& b) {
  check_same_sampling(a, b);
  PartMetricReport rep;
  rep.times = a.times;
  for (std::size_t k = 0; k < a.times.size(); ++k) {
    rep.values.push_back(part_metric(a.snapshots[k], b.snapshots[k]));
    if (k > 0) {
      const double inc = rep.values[k] - rep.values[k - 1];
      rep.max_increase = std::max(rep.max_increase, inc);
      if (inc > kPartMetricSlack) rep.violations.push_back(k);
    }
  }
  rep.passed = rep.violations.empty();
  return rep;
}

PartMetricReport check_part_metric_decay(const DispersalOp& op, const Reaction& reaction,
                                         const Field& u0, const Field& v0, double T, double dt,
                                         std::size_t record_every) {
  if (!(u0.min() > 0.0) || !(v0.min() > 0.0))
    throw Error(ErrorKind::not_positive, "part metric decay needs strictly positive initial data");
  const Trajectory a = evolve(op, reaction, u0, T, dt, record_every);
  const Trajectory b = evolve(op, reaction, v0, T, dt, record_every);
  return part_metric_sequence(a, b);
}

SuperSolutionReport check_exponential_supersolution(const Trajectory& traj, double d, double mu,
                                                    double c, const Direction& xi) {
  SuperSolutionReport rep;
  const Habitat& h = traj.habitat;
  std::vector<double> proj(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) proj[i] = xi.dot(h.point(i));

  const Field& u0 = traj.initial();
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (u0[i] > d * std::exp(-mu * proj[i])) {
      rep.status = CheckStatus::input_error;
      rep.message = "initial data exceeds d e^{-mu x.xi}";
      return rep;
    }
  }
  double excess = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    const double t = traj.times[k];
    const auto& u = traj.snapshots[k].values;
    for (std::size_t i = 0; i < u.size(); ++i)
      excess = std::max(excess, u[i] - d * std::exp(-mu * (proj[i] - c * t)));
  }
  rep.max_excess = excess;
  rep.status = excess <= 1e-8 * d ? CheckStatus::passed : CheckStatus::failed;
  return rep;
}

}  // namespace kpplab

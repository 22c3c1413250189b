#include "kpplab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numbers>
#include <sstream>

#include "kpplab/error.hpp"

namespace kpplab {

FrontTrace track_front(const Trajectory& traj, const Direction& xi, double level,
                       double dispersal_reach) {
  if (!(level > 0.0)) throw Error(ErrorKind::invalid_argument, "front level must be positive");
  const Habitat& h = traj.habitat;
  if (xi.dim() != h.dim()) throw Error(ErrorKind::invalid_argument, "direction and habitat dims differ");
  FrontTrace trace;
  trace.level = level;
  trace.xi = xi;
  trace.boundary_position = h.max_projection(xi);
  trace.guard = dispersal_reach + 10.0 * h.spacing();

  const int n = h.axis_points();
  const double sp = h.spacing();
  std::vector<double> proj(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) proj[i] = xi.dot(h.point(i));

  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    const auto& u = traj.snapshots[k].values;
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < u.size(); ++i) {
      if (!(u[i] >= level)) continue;
      best = std::max(best, proj[i]);
      for (int d = 0; d < h.dim(); ++d) {
        if (xi[d] == 0.0) continue;
        const int dir = xi[d] > 0.0 ? 1 : -1;
        const int a = h.axis_index(i, d) + dir;
        if (a < 0 || a >= n) continue;
        const std::size_t j = static_cast<std::size_t>(static_cast<long>(i) + dir * static_cast<long>(h.stride(d)));
        if (u[j] < level) {
          const double theta = (u[i] - level) / (u[i] - u[j]);
          best = std::max(best, proj[i] + theta * sp * std::abs(xi[d]));
        }
      }
    }
    trace.times.push_back(traj.times[k]);
    trace.positions.push_back(std::isfinite(best) ? best : std::numeric_limits<double>::quiet_NaN());
  }
  return trace;
}

SpeedEstimate estimate_speed(const FrontTrace& trace, double burn_in_fraction,
                             std::optional<double> theoretical) {
  if (trace.times.empty()) throw Error(ErrorKind::window_too_short, "empty front trace");
  if (!(burn_in_fraction >= 0.0 && burn_in_fraction < 1.0))
    throw Error(ErrorKind::invalid_argument, "burn-in fraction must lie in [0, 1)");
  const double t_final = trace.times.back();
  const double t_begin = burn_in_fraction * t_final;
  const double limit = trace.boundary_position - trace.guard;

  double t_safe = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < trace.times.size(); ++k) {
    if (std::isfinite(trace.positions[k]) && trace.positions[k] > limit) {
      t_safe = trace.times[k];
      break;
    }
  }
  if (t_safe <= t_begin) {
    std::ostringstream msg;
    msg << "front within " << trace.guard << " of the boundary at t = " << t_safe
        << ", before burn-in ends at " << t_begin;
    throw Error(ErrorKind::boundary_hit, msg.str());
  }

  std::vector<double> ts, xs;
  for (std::size_t k = 0; k < trace.times.size(); ++k) {
    const double t = trace.times[k];
    if (t < t_begin || t >= t_safe) continue;
    if (!std::isfinite(trace.positions[k]))
      throw Error(ErrorKind::window_too_short, "empty level set inside the fit window");
    ts.push_back(t);
    xs.push_back(trace.positions[k]);
  }
  if (ts.size() < 10) throw Error(ErrorKind::window_too_short, "fewer than 10 samples in the fit window");

  const double n = static_cast<double>(ts.size());
  double mt = 0.0, mx = 0.0;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    mt += ts[k];
    mx += xs[k];
  }
  mt /= n;
  mx /= n;
  double stt = 0.0, stx = 0.0;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    stt += (ts[k] - mt) * (ts[k] - mt);
    stx += (ts[k] - mt) * (xs[k] - mx);
  }
  SpeedEstimate est;
  est.slope = stx / stt;
  est.intercept = mx - est.slope * mt;
  est.t_begin = ts.front();
  est.t_end = ts.back();
  est.samples = ts.size();
  double ss = 0.0;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    const double r = xs[k] - (est.intercept + est.slope * ts[k]);
    ss += r * r;
  }
  est.rms_residual = std::sqrt(ss / n);
  if (theoretical) {
    est.theoretical = *theoretical;
    est.relative_error = std::abs(est.slope - *theoretical) / std::abs(*theoretical);
  }
  return est;
}

namespace {

std::vector<double> projections(const Habitat& h, const Direction& xi) {
  std::vector<double> p(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) p[i] = xi.dot(h.point(i));
  return p;
}

std::vector<std::size_t> final_quarter(const Trajectory& traj) {
  std::vector<std::size_t> ks;
  const double start = 0.75 * traj.final_time();
  for (std::size_t k = 0; k < traj.times.size(); ++k)
    if (traj.times[k] >= start && traj.times[k] > 0.0) ks.push_back(k);
  return ks;
}

double record_step(double dt, double interval, std::size_t& every) {
  every = static_cast<std::size_t>(std::ceil(interval / dt - 1e-12));
  if (every == 0) every = 1;
  return interval / static_cast<double>(every);
}

}  // namespace

ConeVerdict verify_spreading_cones(const Trajectory& traj, const Direction& xi, double c_theory,
                                   double u0_star, double margin) {
  const std::vector<double> proj = projections(traj.habitat, xi);
  const auto ks = final_quarter(traj);
  if (ks.empty()) throw Error(ErrorKind::empty_region, "no records in the final quarter");
  ConeVerdict v;
  v.inside_evaluated = v.outside_evaluated = true;
  v.inside_min = std::numeric_limits<double>::infinity();
  v.outside_max = -std::numeric_limits<double>::infinity();
  for (std::size_t k : ks) {
    const double t = traj.times[k];
    const auto& u = traj.snapshots[k].values;
    bool any_in = false, any_out = false;
    for (std::size_t i = 0; i < u.size(); ++i) {
      if (proj[i] <= (1.0 - margin) * c_theory * t) {
        any_in = true;
        v.inside_min = std::min(v.inside_min, u[i]);
      }
      if (proj[i] >= (1.0 + margin) * c_theory * t) {
        any_out = true;
        v.outside_max = std::max(v.outside_max, u[i]);
      }
    }
    v.inside_evaluated = v.inside_evaluated && any_in;
    v.outside_evaluated = v.outside_evaluated && any_out;
  }
  if (!v.inside_evaluated && !v.outside_evaluated)
    throw Error(ErrorKind::empty_region, "both cone regions empty at final times");
  v.inside_ok = v.inside_evaluated && v.inside_min >= 0.5 * u0_star;
  v.outside_ok = v.outside_evaluated && v.outside_max <= 0.01 * u0_star;
  return v;
}

ExperimentSetup default_setup(DispersalKind kind, int dim) {
  ExperimentSetup s;
  s.xi = Direction::axis(dim, 0);
  s.reaction = Reaction::linear(1.0, 1.0, 0.0, 2.0);
  switch (kind) {
    case DispersalKind::random:
      s.op = DispersalOp::random();
      s.habitat = dim == 1 ? Habitat::continuum(1, 300.0, 0.1) : Habitat::continuum(2, 100.0, 0.5);
      s.T = dim == 1 ? 100.0 : 40.0;
      break;
    case DispersalKind::nonlocal: {
      const double h = dim == 1 ? 0.1 : 0.25;
      s.op = DispersalOp::nonlocal(Kernel(KernelProfile::tent, 1.0, dim, h));
      s.habitat = dim == 1 ? Habitat::continuum(1, 300.0, h) : Habitat::continuum(2, 60.0, h);
      s.T = dim == 1 ? 100.0 : 60.0;
      break;
    }
    case DispersalKind::discrete:
      s.op = DispersalOp::discrete(LatticeWeights::uniform(dim));
      s.habitat = Habitat::lattice(dim, dim == 1 ? 300 : 100);
      s.T = dim == 1 ? 100.0 : 40.0;
      break;
  }
  return s;
}

ExperimentSetup spreading_setup(DispersalKind kind, int dim) {
  ExperimentSetup s = default_setup(kind, dim);
  s.reaction = s.reaction.with_amplitude(0.5);
  if (dim == 1) {
    switch (kind) {
      case DispersalKind::random:
        s.habitat = Habitat::continuum(1, 150.0, 0.1);
        s.T = 60.0;
        break;
      case DispersalKind::nonlocal:
        s.habitat = Habitat::continuum(1, 150.0, 0.1);
        s.T = 150.0;
        break;
      case DispersalKind::discrete:
        s.habitat = Habitat::lattice(1, 160);
        s.T = 60.0;
        break;
    }
  }
  return s;
}

std::vector<Direction> sample_directions(int dim) {
  if (dim == 1) return {Direction::axis(1, 0, +1), Direction::axis(1, 0, -1)};
  std::vector<Direction> ds;
  for (int k = 0; k < 8; ++k) ds.push_back(Direction::angle(2.0 * std::numbers::pi * k / 8.0));
  return ds;
}

namespace {

SweepCell run_sweep_cell(const ExperimentSetup& setup, double amplitude, double c_theory,
                         double u0_star) {
  const Reaction reaction = setup.reaction.with_amplitude(amplitude);
  const KppReport kpp = check_kpp_hypotheses(reaction, setup.habitat);
  if (!kpp.h1_ok || !kpp.h2_ok)
    throw Error(ErrorKind::invalid_argument, "reaction violates the KPP hypotheses");
  if (!(reaction.min_rate_at_zero() > 0.0))
    throw Error(ErrorKind::invalid_argument, "sweep requires f(x,0) > 0");

  const Field u0 = make_front_initial(setup.habitat, setup.xi, u0_star);
  const double bound = stable_step_bound(setup.op, reaction, u0);
  std::size_t every = 1;
  const double dt = record_step(setup.dt > 0.0 ? std::min(setup.dt, bound) : bound,
                                setup.record_interval, every);
  const Trajectory traj = evolve(setup.op, reaction, u0, setup.T, dt, every);

  SweepCell cell;
  cell.amplitude = amplitude;
  const double reach = setup.op.reach(setup.habitat);
  cell.trace = track_front(traj, setup.xi, setup.level_fraction * u0_star, reach);
  cell.speed = estimate_speed(cell.trace, setup.burn_in, c_theory);
  cell.cones = verify_spreading_cones(traj, setup.xi, c_theory, u0_star, setup.margin);
  cell.cones_doubled = verify_spreading_cones(traj, setup.xi, 2.0 * c_theory, u0_star, setup.margin);
  cell.cones_halved = verify_spreading_cones(traj, setup.xi, 0.5 * c_theory, u0_star, setup.margin);

  const StationaryResult stat = solve_stationary(setup.op, reaction, setup.habitat, Route::from_above);
  const std::vector<double> proj = projections(setup.habitat, setup.xi);
  const double T = traj.final_time();
  for (std::size_t i = 0; i < proj.size(); ++i)
    if (proj[i] <= 0.5 * c_theory * T)
      cell.convergence_error = std::max(cell.convergence_error, std::abs(traj.final()[i] - stat.u_star[i]));
  return cell;
}

template <class Fn>
auto run_jobs(std::size_t count, unsigned jobs, Fn fn) {
  using R = decltype(fn(std::size_t{0}));
  std::vector<R> out;
  out.reserve(count);
  if (jobs <= 1) {
    for (std::size_t i = 0; i < count; ++i) out.push_back(fn(i));
    return out;
  }
  std::vector<std::future<R>> pending;
  for (std::size_t i = 0; i < count; ++i) {
    pending.push_back(std::async(std::launch::async, fn, i));
    if (pending.size() == jobs || i + 1 == count) {
      for (auto& f : pending) out.push_back(f.get());
      pending.clear();
    }
  }
  return out;
}

}  // namespace

SweepResult run_inhomogeneity_sweep(const ExperimentSetup& setup, const std::vector<double>& amplitudes,
                                    unsigned jobs) {
  SweepResult res;
  res.kind = setup.op.kind();
  const Reaction base = setup.reaction.homogeneous();
  const double u0_star = positive_equilibrium(base);
  res.theoretical = theoretical_speed(setup.op, base, setup.xi).c_star;

  res.cells = run_jobs(amplitudes.size(), jobs, [&](std::size_t i) {
    return run_sweep_cell(setup, amplitudes[i], res.theoretical, u0_star);
  });

  res.within_theory = res.pairwise = res.controls_fail = res.cones_pass = res.converges = true;
  for (std::size_t i = 0; i < res.cells.size(); ++i) {
    const SweepCell& c = res.cells[i];
    res.max_relative_error = std::max(res.max_relative_error, c.speed.relative_error);
    if (!(c.speed.relative_error <= 0.05)) res.within_theory = false;
    if (!c.cones.passed()) res.cones_pass = false;
    if (!c.cones_doubled.inside_evaluated || c.cones_doubled.inside_ok) res.controls_fail = false;
    if (!c.cones_halved.outside_evaluated || c.cones_halved.outside_ok) res.controls_fail = false;
    if (!(c.convergence_error < 0.05 * u0_star)) res.converges = false;
    for (std::size_t j = 0; j < i; ++j) {
      const double a = c.speed.slope, b = res.cells[j].speed.slope;
      const double rel = std::abs(a - b) / std::min(std::abs(a), std::abs(b));
      res.max_pairwise = std::max(res.max_pairwise, rel);
      if (!(rel <= 0.02)) res.pairwise = false;
    }
  }
  return res;
}

double SpreadingRun::speed_along(const Direction& d) const {
  for (std::size_t k = 0; k < directions.size(); ++k) {
    const Direction& e = directions[k];
    if (std::abs(e[0] - d[0]) < 1e-12 && std::abs(e[1] - d[1]) < 1e-12) return speeds[k];
  }
  throw Error(ErrorKind::invalid_argument, "direction not in the sampled set");
}

SpreadingRun run_spreading(const ExperimentSetup& setup, InitialShape shape) {
  SpreadingRun run{Trajectory{setup.habitat, {}, {}}, Field(setup.habitat), 0.0, setup.xi, {}, {}};
  const Reaction& reaction = setup.reaction;
  const KppReport kpp = check_kpp_hypotheses(reaction, setup.habitat);
  if (!kpp.h1_ok || !kpp.h2_ok)
    throw Error(ErrorKind::invalid_argument, "reaction violates the KPP hypotheses");
  run.u0_star = kpp.u0_star;
  run.xi = setup.xi;
  run.margin = setup.margin;
  run.shape = shape;

  const Field u0 = shape == InitialShape::compact
                       ? make_compact_initial(setup.habitat, setup.plateau_radius, run.u0_star)
                       : make_strip_initial(setup.habitat, setup.xi, setup.plateau_radius, run.u0_star);
  const double bound = stable_step_bound(setup.op, reaction, u0);
  std::size_t every = 1;
  const double dt = record_step(setup.dt > 0.0 ? std::min(setup.dt, bound) : bound,
                                setup.record_interval, every);
  run.traj = evolve(setup.op, reaction, u0, setup.T, dt, every);
  run.u_star = solve_stationary(setup.op, reaction, setup.habitat, Route::from_above).u_star;

  run.directions = sample_directions(setup.habitat.dim());
  const Reaction base = reaction.homogeneous();
  for (const Direction& d : run.directions) run.speeds.push_back(theoretical_speed(setup.op, base, d).c_star);
  return run;
}

ClauseVerdict evaluate_clause(const SpreadingRun& run, int clause, double speed_factor) {
  if (clause < 1 || clause > 4) throw Error(ErrorKind::invalid_argument, "clause must be 1..4");
  const Habitat& h = run.traj.habitat;
  if (clause == 3 && run.shape != InitialShape::compact && h.dim() > 1)
    throw Error(ErrorKind::invalid_argument, "clause 3 needs compactly supported initial data");
  if (clause == 2 && run.shape != InitialShape::strip && h.dim() > 1)
    throw Error(ErrorKind::invalid_argument, "clause 2 needs initial data bounded below on a strip");

  ClauseVerdict v;
  v.clause = clause;
  const double c_xi = run.speed_along(run.xi), c_mxi = run.speed_along(-run.xi);
  const auto [lo, hi] = std::minmax_element(run.speeds.begin(), run.speeds.end());
  switch (clause) {
    case 1: v.speed = std::max(c_xi, c_mxi); break;
    case 2: v.speed = std::min(c_xi, c_mxi); break;
    case 3: v.speed = *hi; break;
    case 4: v.speed = *lo; break;
  }
  v.speed *= speed_factor;
  const bool outer = clause == 1 || clause == 3;
  v.threshold = (outer ? 0.01 : 0.05) * run.u0_star;

  std::vector<double> dist(h.size());
  for (std::size_t i = 0; i < h.size(); ++i)
    dist[i] = clause <= 2 ? std::abs(run.xi.dot(h.point(i))) : h.norm(i);

  v.value = -std::numeric_limits<double>::infinity();
  const auto ks = final_quarter(run.traj);
  if (ks.empty()) throw Error(ErrorKind::empty_region, "no records in the final quarter");
  for (std::size_t k : ks) {
    const double t = run.traj.times[k];
    const auto& u = run.traj.snapshots[k].values;
    bool any = false;
    const double edge = (outer ? 1.0 + run.margin : 1.0 - run.margin) * v.speed * t;
    for (std::size_t i = 0; i < u.size(); ++i) {
      const bool in_region = outer ? dist[i] >= edge : dist[i] <= edge;
      if (!in_region) continue;
      any = true;
      v.value = std::max(v.value, outer ? u[i] : std::abs(u[i] - run.u_star[i]));
    }
    if (!any) {
      std::ostringstream msg;
      msg << "clause " << clause << " region empty at t = " << t;
      throw Error(ErrorKind::empty_region, msg.str());
    }
  }
  v.passed = v.value <= v.threshold;
  return v;
}

ClauseVerdict run_spreading_features(const ExperimentSetup& setup, int clause, double speed_factor) {
  const InitialShape shape =
      (clause == 2 && setup.habitat.dim() > 1) ? InitialShape::strip : InitialShape::compact;
  return evaluate_clause(run_spreading(setup, shape), clause, speed_factor);
}

}  // namespace kpplab

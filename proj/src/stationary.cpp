#include "kpplab/stationary.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kpplab/error.hpp"

namespace kpplab {

const char* to_string(Route route) { return route == Route::from_above ? "from-above" : "from-below"; }

double smooth_cutoff(double s) {
  auto psi = [](double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; };
  s = std::abs(s);
  if (s <= 1.0) return 1.0;
  if (s >= 2.0) return 0.0;
  const double a = psi(2.0 - s), b = psi(s - 1.0);
  return a / (a + b);
}

namespace {

PeriodicCoefficient minorant_cell(const Reaction& reaction, int dim, int m, double h) {
  const double r = reaction.base(0.0);
  const double m0 = reaction.min_rate_at_zero();
  const double l0 = reaction.radius();
  return PeriodicCoefficient::from_function(dim, m, h, [&](const Point& x) {
    const double s = (x[0] * x[0] + x[1] * x[1]) / (l0 * l0);
    return r - smooth_cutoff(s) * (r - m0);
  });
}

double minorant_margin(const Reaction& reaction, const PeriodicCoefficient& cell) {
  double margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < cell.size(); ++i)
    margin = std::min(margin, reaction(cell.position(i), 0.0) - cell[i]);
  return margin;
}

}  // namespace

Minorant periodic_minorant(const Reaction& reaction, double eps, const Habitat& habitat,
                           int min_points) {
  const double r = reaction.base(0.0);
  if (!(eps > 0.0) || !(eps < r))
    throw Error(ErrorKind::invalid_argument, "eps must lie in (0, f0(0))");
  const double h = habitat.spacing();
  const int dim = habitat.dim();
  const int m_max = habitat.axis_points() - 1;
  int m = std::max(static_cast<int>(std::floor(4.0 * reaction.radius() / h)) + 1, min_points);
  for (; m <= m_max; ++m) {
    PeriodicCoefficient cell = minorant_cell(reaction, dim, m, h);
    if (cell.average() >= r - eps) {
      const double margin = minorant_margin(reaction, cell);
      if (margin < 0.0)
        throw Error(ErrorKind::validation_failed, "minorant exceeds f(x,0) on the cell");
      return Minorant{m * h, std::move(cell), margin};
    }
  }
  std::ostringstream msg;
  msg << "no cell up to the habitat width " << m_max * h << " reaches average f0(0) - " << eps;
  throw Error(ErrorKind::period_too_large, msg.str());
}

SubSolution sub_solution(const DispersalOp& op, const Reaction& reaction, const Habitat& habitat,
                         double delta) {
  if (!(delta > 0.0)) throw Error(ErrorKind::invalid_argument, "delta must be positive");
  op.check_habitat(habitat);
  const double eps = 0.5 * reaction.base(0.0);
  Minorant minorant = periodic_minorant(reaction, eps, habitat);

  // Prefer a period whose half divides the habitat.
  const int span_points = habitat.axis_points() - 1;
  const int m0 = minorant.h.cell_points()[0];
  for (int m = m0; m <= span_points; ++m) {
    if (span_points % m == 0) {
      if (m != m0) minorant = periodic_minorant(reaction, eps, habitat, m);
      break;
    }
  }

  const EigenResult eig =
      principal_eigen(CellOperator(op, 0.0, Direction::axis(habitat.dim(), 0), minorant.h));
  const PeriodicCoefficient& phi = eig.eigenfunction;

  Field shape(habitat);
  const long half = (habitat.axis_points() - 1) / 2;
  for (std::size_t i = 0; i < habitat.size(); ++i) {
    std::array<long, kMaxDim> g{habitat.axis_index(i, 0) - half,
                                habitat.dim() == 2 ? habitat.axis_index(i, 1) - half : 0};
    shape[i] = phi[phi.wrap_index(g)];
  }
  const double top = shape.max();
  for (double& v : shape.values) v /= top;

  BoundDispersal disp(op, habitat);
  Field lhs(habitat);
  SubSolution sub{Field(habitat), delta, minorant.period, eig.lambda, 0, 0.0};
  for (int halvings = 0; halvings <= 10; ++halvings) {
    Field v = shape;
    for (double& x : v.values) x *= sub.delta;
    disp.apply(v.view(), lhs.view());
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < habitat.size(); ++i)
      worst = std::min(worst, lhs[i] + v[i] * reaction(habitat.point(i), v[i]));
    sub.min_inequality = worst;
    if (worst >= -1e-10) {
      sub.value = std::move(v);
      sub.halvings = halvings;
      return sub;
    }
    if (halvings < 10) sub.delta *= 0.5;
  }
  std::ostringstream msg;
  msg << "sub-solution inequality still fails at delta = " << sub.delta
      << " (min " << sub.min_inequality << ", lambda = " << eig.lambda << ")";
  throw Error(ErrorKind::validation_failed, msg.str());
}

StationaryResult solve_stationary(const DispersalOp& op, const Reaction& reaction,
                                  const Habitat& habitat, Route route,
                                  const StationaryOptions& options) {
  Field u0(habitat);
  if (route == Route::from_above) {
    u0 = Field(habitat, reaction.beta0() + 1.0);
  } else {
    u0 = sub_solution(op, reaction, habitat, options.sub_delta).value;
  }
  const double bound = stable_step_bound(op, reaction, u0);
  const double dt_req = options.dt > 0.0 ? std::min(options.dt, bound) : bound;
  const auto per_record = static_cast<std::size_t>(std::ceil(1.0 / dt_req - 1e-12));
  const double dt = 1.0 / static_cast<double>(per_record);

  Integrator integ(op, reaction, u0, dt);
  StationaryResult res{u0, route, 0.0, 0.0, 0, 0.0, 0.0, false, {}};
  if (options.keep_iterates) res.iterates.push_back(u0);
  std::vector<double> prev = u0.values;
  while (true) {
    integ.advance(per_record);
    ++res.records;
    const auto& cur = integ.state().values;
    double change = 0.0, against = 0.0;
    for (std::size_t i = 0; i < cur.size(); ++i) {
      const double d = cur[i] - prev[i];
      change = std::max(change, std::abs(d));
      against = std::max(against, route == Route::from_above ? d : -d);
    }
    res.monotonicity_violation = std::max(res.monotonicity_violation, against);
    res.last_change = change;
    if (options.keep_iterates) res.iterates.push_back(integ.state());
    prev = cur;
    if (change < options.tol) break;
    if (integ.time() >= options.t_max - 1e-9) {
      std::ostringstream msg;
      msg << "no stationary state by t = " << integ.time() << "; last change " << change
          << ", residual " << stationary_residual(op, reaction, integ.state());
      throw Error(ErrorKind::no_convergence, msg.str());
    }
  }
  res.u_star = integ.state();
  res.time = integ.time();
  res.residual = stationary_residual(op, reaction, res.u_star);
  res.monotone = res.monotonicity_violation <= 1e-10;
  return res;
}

double check_tail(const Field& u_star, double u0_star, double R, double dispersal_reach) {
  const Habitat& h = u_star.habitat;
  const double outer = h.half_extent() - dispersal_reach - 5.0 * h.spacing();
  if (!(R <= outer)) throw Error(ErrorKind::empty_region, "tail window is empty");
  double sup = -1.0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double r = h.norm(i);
    if (r >= R && r <= outer) sup = std::max(sup, std::abs(u_star[i] - u0_star));
  }
  if (sup < 0.0) throw Error(ErrorKind::empty_region, "no grid point in the tail window");
  return sup;
}

StabilityReport check_stability(const DispersalOp& op, const Reaction& reaction, const Field& u_star,
                                const std::vector<Field>& perturbations, double T, double dt) {
  StabilityReport rep;
  for (const Field& p : perturbations) {
    if (!(p.min() > 0.0))
      throw Error(ErrorKind::not_positive, "stability perturbations must be strictly positive");
    const double bound = stable_step_bound(op, reaction, p);
    const double step = dt > 0.0 ? std::min(dt, bound) : bound;
    Integrator integ(op, reaction, p, step);
    integ.advance(static_cast<std::size_t>(std::ceil(T / step - 1e-9)));
    const double dist = max_abs_diff(integ.state().view(), u_star.view());
    rep.distances.push_back(dist);
    rep.max_distance = std::max(rep.max_distance, dist);
  }
  rep.passed = rep.max_distance < 1e-4;
  return rep;
}

}  // namespace kpplab

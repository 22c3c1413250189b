// Acceptance run: one PASS/FAIL line per criterion.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "kpplab/error.hpp"
#include "kpplab/experiments.hpp"
#include "kpplab/speeds.hpp"
#include "kpplab/stationary.hpp"

using namespace kpplab;

namespace {

struct Verdict {
  bool ok = true;
  std::ostringstream detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail << " [failed: " << what << "]";
    }
  }
};

std::string fmt(double x, const char* spec = "%.4g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, x);
  return buf;
}

const Direction kEast = Direction::axis(1, 0);

// Shared between the Fisher speed and the super-solution checks.
struct FisherRun {
  ExperimentSetup setup = default_setup(DispersalKind::random, 1);
  Trajectory traj{setup.habitat, {}, {}};
};

FisherRun fisher_run() {
  FisherRun run;
  const ExperimentSetup& s = run.setup;
  const Field u0 = make_front_initial(s.habitat, s.xi, 1.0);
  const double bound = stable_step_bound(s.op, s.reaction, u0);
  const auto every = static_cast<std::size_t>(std::ceil(s.record_interval / bound - 1e-12));
  run.traj = evolve(s.op, s.reaction, u0, s.T, s.record_interval / every, every, Scheme::rk4);
  return run;
}

void fisher_speed(Verdict& v, const FisherRun& run, double seconds) {
  const SpeedEstimate e = estimate_speed(track_front(run.traj, kEast, 0.5), 0.5, 2.0);
  v.detail << "slope " << fmt(e.slope, "%.5f") << ", rel err " << fmt(e.relative_error) << ", "
           << fmt(seconds, "%.1f") << " s";
  v.require(e.relative_error <= 0.05, "slope within 5% of 2");
  v.require(seconds <= 120.0, "runtime <= 2 min");
}

void inhomogeneity_invariance(Verdict& v, unsigned jobs) {
  for (DispersalKind kind : {DispersalKind::random, DispersalKind::nonlocal, DispersalKind::discrete}) {
    const SweepResult r = run_inhomogeneity_sweep(default_setup(kind, 1), {-0.5, 0.0, 0.5, 1.0}, jobs);
    v.detail << to_string(kind) << ": c=" << fmt(r.theoretical) << " err " << fmt(r.max_relative_error)
             << " pair " << fmt(r.max_pairwise) << "; ";
    v.require(r.within_theory, std::string(to_string(kind)) + " within 5%");
    v.require(r.pairwise, std::string(to_string(kind)) + " pairwise 2%");
    v.require(r.controls_fail, std::string(to_string(kind)) + " negative controls");
    v.require(r.cones_pass && r.converges, std::string(to_string(kind)) + " cones/convergence");
  }
}

double scan(const std::function<double(double)>& lambda, double lo, double hi) {
  double best = std::numeric_limits<double>::infinity();
  for (double mu = lo; mu <= hi; mu += 1e-5) best = std::min(best, lambda(mu) / mu);
  return best;
}

void speed_oracle(Verdict& v) {
  std::mt19937_64 rng(31337);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int k = 0; k < 12; ++k) {
    DispersalOp op = DispersalOp::random();
    std::function<double(double)> lambda;
    const double r = 0.2 + 2.0 * u(rng);
    if (k % 3 == 0) {
      lambda = [r](double mu) { return mu * mu + r; };
    } else if (k % 3 == 1) {
      const double ap = 0.3 + 1.7 * u(rng), am = 0.3 + 1.7 * u(rng);
      op = DispersalOp::discrete(LatticeWeights({ap, am}));
      lambda = [=](double mu) { return ap * (std::exp(-mu) - 1.0) + am * (std::exp(mu) - 1.0) + r; };
    } else {
      const double d = 0.5 + 1.5 * u(rng);
      op = DispersalOp::nonlocal(Kernel(KernelProfile::tent, d, 1, d / 10));
      lambda = [=](double mu) { return 2.0 * (std::cosh(mu * d) - 1.0) / (mu * d * mu * d) - 1.0 + r; };
    }
    const SpeedResult s = minimize_speed(closed_form_relation(op, kEast, r));
    const double brute = scan(lambda, std::max(1e-3, s.mu_star - 2.0), std::min(20.0, s.mu_star + 2.0));
    worst = std::max(worst, std::abs(s.c_star - brute) / brute);
  }
  double worst_random = 0.0;
  for (double r : {0.3, 1.0, 2.5, 4.0}) {
    const double c = minimize_speed(closed_form_relation(DispersalOp::random(), kEast, r)).c_star;
    worst_random = std::max(worst_random, std::abs(c - 2.0 * std::sqrt(r)) / (2.0 * std::sqrt(r)));
  }
  v.detail << "12 draws, max rel diff vs scan " << fmt(worst) << "; random vs 2 sqrt(r) " << fmt(worst_random);
  v.require(worst <= 1e-6, "golden section vs scan");
  v.require(worst_random <= 1e-9, "random closed form");
}

void eigen_oracle(Verdict& v) {
  bool positive = true;
  double lattice_err = 0.0, random_err = 0.0;
  for (int dim : {1, 2}) {
    const LatticeWeights w = dim == 1 ? LatticeWeights({1.0, 0.7}) : LatticeWeights({1.0, 0.5, 2.0, 0.3});
    const Direction xi = dim == 1 ? kEast : Direction::angle(0.4);
    for (double mu : {0.0, 0.3, 1.0, 1.7}) {
      const EigenResult r =
          principal_eigen(CellOperator(DispersalOp::discrete(w), mu, xi, PeriodicCoefficient::constant(dim, 6, 1.0, 0.8)));
      double expect = 0.8;
      for (int d = 0; d < dim; ++d)
        expect += w.rate(d, +1) * (std::exp(-mu * xi[d]) - 1.0) + w.rate(d, -1) * (std::exp(mu * xi[d]) - 1.0);
      lattice_err = std::max(lattice_err, std::abs(r.lambda - expect));
      positive = positive && r.eigenfunction.min() > 0.0;
    }
  }
  for (double mu : {0.0, 0.5, 1.0, 2.0}) {
    const EigenResult r =
        principal_eigen(CellOperator(DispersalOp::random(), mu, kEast, PeriodicCoefficient::constant(1, 64, 0.05, 1.0)));
    random_err = std::max(random_err, std::abs(r.lambda - (1.0 + mu * mu)));
    positive = positive && r.eigenfunction.min() > 0.0;
  }
  const double mu = 1.0, rr = 0.5;
  const double exact = lambda_closed_form(DispersalOp::nonlocal(Kernel(KernelProfile::tent, 1.0, 1, 0.1)), mu, kEast, rr);
  std::vector<double> errs;
  for (int n : {8, 16, 32, 64}) {
    const double h = 1.0 / n;
    const DispersalOp op = DispersalOp::nonlocal(Kernel(KernelProfile::tent, 1.0, 1, h));
    const EigenResult r = principal_eigen(CellOperator(op, mu, kEast, PeriodicCoefficient::constant(1, 4 * n, h, rr)));
    positive = positive && r.eigenfunction.min() > 0.0;
    errs.push_back(std::abs(r.lambda - exact));
  }
  double omin = 1e9, omax = -1e9;
  for (std::size_t k = 1; k < errs.size(); ++k) {
    const double order = std::log2(errs[k - 1] / errs[k]);
    omin = std::min(omin, order);
    omax = std::max(omax, order);
  }
  v.detail << "lattice err " << fmt(lattice_err) << ", random err " << fmt(random_err) << ", continuum order ["
           << fmt(omin, "%.3f") << ", " << fmt(omax, "%.3f") << "]";
  v.require(lattice_err <= 1e-10, "lattice exact");
  v.require(random_err <= 1e-9, "random closed form");
  v.require(omin >= 1.8 && omax <= 2.2, "order 2");
  v.require(positive, "eigenfunctions positive");
}

PeriodicCoefficient random_coefficient(DispersalKind kind, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  if (kind == DispersalKind::discrete) {
    const int m = 2 + static_cast<int>(6 * u(rng));
    std::vector<double> s(m);
    for (double& x : s) x = 0.2 + 1.3 * u(rng);
    return PeriodicCoefficient(1, {m, 1}, 1.0, s);
  }
  const double h = 0.1;
  const int m = 30 + static_cast<int>(30 * u(rng));
  const double p = m * h;
  const double c0 = 0.5 + u(rng), a1 = 0.3 * u(rng), a2 = 0.2 * u(rng), ph = 6.28 * u(rng);
  return PeriodicCoefficient::from_function(1, m, h, [&](const Point& x) {
    return c0 + a1 * std::sin(2 * std::numbers::pi * x[0] / p + ph) + a2 * std::cos(4 * std::numbers::pi * x[0] / p);
  });
}

void average_bound(Verdict& v) {
  std::mt19937_64 rng(5);
  double worst = std::numeric_limits<double>::infinity();
  int checked = 0;
  for (DispersalKind kind : {DispersalKind::random, DispersalKind::nonlocal, DispersalKind::discrete}) {
    const DispersalOp op = kind == DispersalKind::random     ? DispersalOp::random()
                           : kind == DispersalKind::nonlocal ? DispersalOp::nonlocal(Kernel(KernelProfile::tent, 1.0, 1, 0.1))
                                                             : DispersalOp::discrete(LatticeWeights::uniform(1));
    for (int k = 0; k < 10; ++k) {
      const PeriodicCoefficient a = random_coefficient(kind, rng);
      for (double mu : {0.0, 0.5, 2.0}) {
        const AverageBoundReport r = check_average_lower_bound(op, mu, kEast, a);
        worst = std::min(worst, r.lambda - r.lambda_averaged);
        v.require(r.passed, std::string(to_string(kind)) + " mu=" + fmt(mu));
        ++checked;
      }
    }
  }
  v.detail << checked << " checks, min lambda - lambda(avg) = " << fmt(worst);
}

void stationary_solution(Verdict& v) {
  for (DispersalKind kind : {DispersalKind::random, DispersalKind::nonlocal, DispersalKind::discrete}) {
    const ExperimentSetup base = default_setup(kind, 1);
    const Reaction f = base.reaction.with_amplitude(1.0);
    const double L0 = f.radius();
    const Habitat hab = kind == DispersalKind::discrete ? Habitat::lattice(1, static_cast<int>(40 * L0))
                                                        : Habitat::continuum(1, 40 * L0, 0.1);
    const StationaryResult above = solve_stationary(base.op, f, hab, Route::from_above);
    const StationaryResult below = solve_stationary(base.op, f, hab, Route::from_below);
    const double agree = max_abs_diff(above.u_star.view(), below.u_star.view());
    const double residual = std::max(above.residual, below.residual);
    const double tail = check_tail(above.u_star, 1.0, 4 * L0, base.op.reach(hab));

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> factor(0.5, 1.5);
    Field noisy = above.u_star;
    for (double& x : noisy.values) x *= factor(rng);
    const StabilityReport stab =
        check_stability(base.op, f, above.u_star, {noisy, Field(hab, 0.05), Field(hab, f.beta0() + 1.0)}, 200.0);
    v.detail << to_string(kind) << ": agree " << fmt(agree) << " res " << fmt(residual) << " tail " << fmt(tail)
             << " stab " << fmt(stab.max_distance) << "; ";
    const std::string k = to_string(kind);
    v.require(agree <= 1e-6, k + " routes agree");
    v.require(residual <= 1e-7, k + " residual");
    v.require(tail < 0.01, k + " tail");
    v.require(stab.passed && stab.max_distance <= 1e-4, k + " stability");
  }
}

struct Model {
  DispersalOp op;
  Habitat habitat;
};

Field smooth_random(const Habitat& h, std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> d(0.0, 1.0);
  const double a = d(rng), b = d(rng), ph = 6.28 * d(rng);
  return Field::from_function(h, [&](const Point& x) {
    return lo + (hi - lo) * (0.5 + 0.25 * a * std::sin(0.7 * x[0] + ph) + 0.25 * b * std::cos(0.31 * x[0]));
  });
}

void order_structure(Verdict& v) {
  const std::vector<Model> models{
      {DispersalOp::random(), Habitat::continuum(1, 10.0, 0.2)},
      {DispersalOp::nonlocal(Kernel(KernelProfile::tent, 1.0, 1, 0.2)), Habitat::continuum(1, 10.0, 0.2)},
      {DispersalOp::discrete(LatticeWeights::uniform(1)), Habitat::lattice(1, 20)},
  };
  const Reaction f = Reaction::linear(1.0, 1.0, 0.8, 2.0);
  std::mt19937_64 rng(2024);
  double violation = 0.0, increase = 0.0;
  int pairs = 0;
  for (const Model& m : models) {
    for (int k = 0; k < 20; ++k) {
      const Field lo = smooth_random(m.habitat, rng, 0.0, 1.0);
      Field hi = lo;
      const Field bump = smooth_random(m.habitat, rng, 0.0, 0.5);
      for (std::size_t i = 0; i < hi.size(); ++i) hi[i] += bump[i];
      const double dt = stable_step_bound(m.op, f, hi);
      const ComparisonReport r = check_comparison(evolve(m.op, f, lo, 3.0, dt, 20), evolve(m.op, f, hi, 3.0, dt, 20));
      violation = std::max(violation, r.max_violation);
      v.require(r.passed, "comparison pair");
      ++pairs;
    }
    for (int k = 0; k < 10; ++k) {
      const Field u0 = smooth_random(m.habitat, rng, 0.05, 2.0), v0 = smooth_random(m.habitat, rng, 0.05, 2.0);
      const double dt = stable_step_bound(m.op, f, Field(m.habitat, 2.0));
      const PartMetricReport r = check_part_metric_decay(m.op, f, u0, v0, 5.0, dt, 5);
      increase = std::max(increase, r.max_increase);
      v.require(r.passed, "part metric decay");
    }
  }
  std::uniform_real_distribution<double> d(0.05, 4.0);
  const Habitat h = Habitat::continuum(1, 1.4, 0.2);
  double oracle_err = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    Field u(h), w(h);
    for (std::size_t i = 0; i < h.size(); ++i) {
      u[i] = d(rng);
      w[i] = d(rng);
    }
    auto ok = [&](double alpha) {
      for (std::size_t i = 0; i < h.size(); ++i)
        if (!(u[i] / alpha <= w[i] && w[i] <= alpha * u[i])) return false;
      return true;
    };
    double lo = 1.0, hi = 2.0;
    while (!ok(hi)) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (ok(mid) ? hi : lo) = mid;
    }
    oracle_err = std::max(oracle_err, std::abs(part_metric(u, w) - std::log(hi)));
  }
  v.detail << pairs << " ordered pairs, max violation " << fmt(violation) << "; part metric max increase "
           << fmt(increase) << "; alpha-search diff " << fmt(oracle_err);
  v.require(violation <= kOrderTolerance, "comparison violation");
  v.require(oracle_err <= 1e-10, "alpha-search oracle");
}

void supersolution(Verdict& v, const FisherRun& run) {
  const double d = std::exp(1.0);
  const SuperSolutionReport good = check_exponential_supersolution(run.traj, d, 1.0, 2.0, kEast);
  const SuperSolutionReport bad = check_exponential_supersolution(run.traj, d, 1.0, 1.0, kEast);
  v.detail << "(1, 2): " << to_string(good.status) << " excess " << fmt(good.max_excess) << "; (1, 1): "
           << to_string(bad.status) << " excess " << fmt(bad.max_excess);
  v.require(good.status == CheckStatus::passed, "bound at c = 2");
  v.require(bad.status == CheckStatus::failed, "negative control at c = 1");
}

void spreading_clauses(Verdict& v) {
  struct Case {
    DispersalKind kind;
    int dim;
  };
  for (const Case& c : {Case{DispersalKind::random, 1}, Case{DispersalKind::nonlocal, 1},
                        Case{DispersalKind::discrete, 1}, Case{DispersalKind::random, 2}}) {
    const ExperimentSetup s = spreading_setup(c.kind, c.dim);
    const std::string label = std::string(to_string(c.kind)) + "/" + std::to_string(c.dim) + "d";
    const SpreadingRun compact = run_spreading(s, InitialShape::compact);
    std::optional<SpreadingRun> strip;
    if (c.dim > 1) strip = run_spreading(s, InitialShape::strip);
    v.detail << label << ":";
    for (int k : {1, 2, 3, 4}) {
      const SpreadingRun& run = (k == 2 && strip) ? *strip : compact;
      const ClauseVerdict cv = evaluate_clause(run, k);
      const ClauseVerdict control = evaluate_clause(run, k, (k == 1 || k == 3) ? 0.5 : 2.0);
      v.detail << " " << k << "=" << fmt(cv.value, "%.2g");
      v.require(cv.passed, label + " clause " + std::to_string(k));
      v.require(!control.passed, label + " control " + std::to_string(k));
    }
    v.detail << "; ";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kpplab acceptance criteria"};
  unsigned jobs = 1;
  app.add_option("--jobs", jobs, "Concurrent sweep cells")->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);

  int failures = 0;
  auto report = [&](const char* id, const std::function<void(Verdict&)>& body) {
    Verdict v;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      body(v);
    } catch (const std::exception& e) {
      v.ok = false;
      v.detail << " [error: " << e.what() << "]";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!v.ok) ++failures;
    std::cout << id << " " << (v.ok ? "PASS" : "FAIL") << " (" << fmt(secs, "%.1f") << " s) " << v.detail.str()
              << std::endl;
  };

  FisherRun fisher;
  double fisher_seconds = 0.0;
  report("AC1", [&](Verdict& v) {
    const auto t0 = std::chrono::steady_clock::now();
    fisher = fisher_run();
    fisher_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    fisher_speed(v, fisher, fisher_seconds);
  });
  report("AC2", [&](Verdict& v) { inhomogeneity_invariance(v, jobs); });
  report("AC3", speed_oracle);
  report("AC4", eigen_oracle);
  report("AC5", average_bound);
  report("AC6", stationary_solution);
  report("AC7", order_structure);
  report("AC8", [&](Verdict& v) {
    if (fisher.traj.snapshots.empty()) throw Error(ErrorKind::invalid_argument, "Fisher run unavailable");
    supersolution(v, fisher);
  });
  report("AC9", spreading_clauses);
  std::cout << (failures == 0 ? "ALL PASS" : std::to_string(failures) + " criteria FAILED") << std::endl;
  return failures == 0 ? 0 : 1;
}

#include "kpplab/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <random>

#include "kpplab/error.hpp"
#include "kpplab/io.hpp"

namespace kpplab {

using nlohmann::json;

namespace {

struct Outcome {
  bool passed = false;
  json summary;
  std::vector<std::pair<std::string, std::string>> csv;  // name, content
};

std::string amp_key(double a) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "A=%+.3f", a);
  return buf;
}

double record_dt(const RunConfig& cfg, const Field& u0, std::size_t& every) {
  const double bound = stable_step_bound(cfg.op, cfg.reaction, u0);
  const double dt = cfg.dt > 0.0 ? std::min(cfg.dt, bound) : bound;
  every = static_cast<std::size_t>(std::ceil(cfg.record_interval / dt - 1e-12));
  if (every == 0) every = 1;
  return cfg.record_interval / static_cast<double>(every);
}

Outcome front_speed(const RunConfig& cfg) {
  const ExperimentConfig& ex = cfg.experiment;
  const KppReport kpp = check_kpp_hypotheses(cfg.reaction, cfg.habitat);
  if (!kpp.h1_ok || !kpp.h2_ok) throw Error(ErrorKind::invalid_argument, "reaction violates the KPP hypotheses");
  const double c = theoretical_speed(cfg.op, cfg.reaction, ex.xi).c_star;
  const Field u0 = make_front_initial(cfg.habitat, ex.xi, kpp.u0_star);
  std::size_t every = 1;
  const double dt = record_dt(cfg, u0, every);
  const Trajectory traj = evolve(cfg.op, cfg.reaction, u0, cfg.T, dt, every, cfg.scheme);
  const FrontTrace trace = track_front(traj, ex.xi, ex.level_fraction * kpp.u0_star, cfg.op.reach(cfg.habitat));
  const SpeedEstimate est = estimate_speed(trace, ex.burn_in, c);
  const ConeVerdict cones = verify_spreading_cones(traj, ex.xi, ex.speed_factor * c, kpp.u0_star, ex.margin);

  Outcome out;
  out.passed = est.relative_error <= ex.tolerance && cones.passed();
  out.summary = json{{"theoretical_speed", c},
                     {"estimate", to_json(est)},
                     {"cones", to_json(cones)},
                     {"cone_speed", ex.speed_factor * c},
                     {"dt", dt},
                     {"clip_count", traj.clip_count}};
  out.csv.emplace_back("front.csv", front_csv(trace));
  out.csv.emplace_back("final.csv", field_csv(traj.final()));
  if (cfg.output.trajectory) out.csv.emplace_back("trajectory.csv", trajectory_csv(traj));
  return out;
}

Outcome sweep(const RunConfig& cfg, unsigned jobs) {
  const ExperimentSetup setup = cfg.setup();
  std::vector<double> amps = cfg.experiment.amplitudes;
  std::sort(amps.begin(), amps.end());
  const SweepResult res = run_inhomogeneity_sweep(setup, amps, jobs);
  Outcome out;
  out.passed = res.passed();
  json cells = json::array();
  for (const SweepCell& cell : res.cells) {
    const std::string key = amp_key(cell.amplitude);
    cells.push_back(json{{"cell", key},
                         {"amplitude", cell.amplitude},
                         {"empirical_speed", cell.speed.slope},
                         {"theoretical_speed", res.theoretical},
                         {"relative_error", cell.speed.relative_error},
                         {"cones", to_json(cell.cones)},
                         {"control_doubled_inside_fails", !cell.cones_doubled.inside_ok},
                         {"control_halved_outside_fails", !cell.cones_halved.outside_ok},
                         {"convergence_error", cell.convergence_error},
                         {"verdict", cell.speed.relative_error <= 0.05 && cell.cones.passed() ? "pass" : "fail"}});
    out.csv.emplace_back("front_" + key + ".csv", front_csv(cell.trace));
  }
  out.summary = json{{"kind", to_string(res.kind)},
                     {"theoretical_speed", res.theoretical},
                     {"cells", cells},
                     {"within_theory", res.within_theory},
                     {"pairwise", res.pairwise},
                     {"max_relative_error", res.max_relative_error},
                     {"max_pairwise", res.max_pairwise},
                     {"controls_fail", res.controls_fail},
                     {"cones_pass", res.cones_pass},
                     {"converges", res.converges}};
  return out;
}

Outcome clause(const RunConfig& cfg) {
  const ExperimentSetup setup = cfg.setup();
  const int k = cfg.experiment.clause;
  const InitialShape shape = (k == 2 && cfg.habitat.dim() > 1) ? InitialShape::strip : InitialShape::compact;
  const SpreadingRun run = run_spreading(setup, shape);
  const ClauseVerdict v = evaluate_clause(run, k, cfg.experiment.speed_factor);
  Outcome out;
  out.passed = v.passed;
  json speeds = json::array();
  for (std::size_t i = 0; i < run.directions.size(); ++i)
    speeds.push_back(json{{"direction", {run.directions[i][0], run.directions[i][1]}}, {"c_star", run.speeds[i]}});
  out.summary = json{{"clause", to_json(v)}, {"speed_factor", cfg.experiment.speed_factor}, {"speeds", speeds}};
  out.csv.emplace_back("final.csv", field_csv(run.traj.final()));
  out.csv.emplace_back("stationary.csv", field_csv(run.u_star));
  if (cfg.output.trajectory) out.csv.emplace_back("trajectory.csv", trajectory_csv(run.traj));
  return out;
}

Outcome stationary(const RunConfig& cfg, std::uint64_t seed) {
  const KppReport kpp = check_kpp_hypotheses(cfg.reaction, cfg.habitat);
  if (!kpp.h1_ok || !kpp.h2_ok) throw Error(ErrorKind::invalid_argument, "reaction violates the KPP hypotheses");
  StationaryOptions opts;
  opts.dt = cfg.dt;
  const StationaryResult above = solve_stationary(cfg.op, cfg.reaction, cfg.habitat, Route::from_above, opts);
  const StationaryResult below = solve_stationary(cfg.op, cfg.reaction, cfg.habitat, Route::from_below, opts);
  const double agreement = max_abs_diff(above.u_star.view(), below.u_star.view());
  const double R = cfg.experiment.tail_radius > 0.0 ? cfg.experiment.tail_radius : 4.0 * cfg.reaction.radius();
  const double tail = check_tail(above.u_star, kpp.u0_star, R, cfg.op.reach(cfg.habitat));

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> factor(0.5, 1.5);
  std::vector<Field> perturbations;
  Field noisy = above.u_star;
  for (double& v : noisy.values) v *= factor(rng);
  perturbations.push_back(noisy);
  perturbations.emplace_back(cfg.habitat, 0.05 * kpp.u0_star);
  perturbations.emplace_back(cfg.habitat, kpp.beta0 + 1.0);
  const StabilityReport stab = check_stability(cfg.op, cfg.reaction, above.u_star, perturbations, 200.0, cfg.dt);

  Outcome out;
  const bool agree_ok = agreement <= 1e-6;
  const bool residual_ok = std::max(above.residual, below.residual) <= 1e-7;
  const bool tail_ok = tail < 0.01;
  out.passed = agree_ok && residual_ok && tail_ok && stab.passed;
  out.summary = json{{"from_above", to_json(above)},
                     {"from_below", to_json(below)},
                     {"agreement", agreement},
                     {"tail_radius", R},
                     {"tail_deviation", tail},
                     {"stability_distances", stab.distances},
                     {"checks",
                      {{"routes_agree", agree_ok},
                       {"residual", residual_ok},
                       {"tail", tail_ok},
                       {"stability", stab.passed}}}};
  out.csv.emplace_back("stationary.csv", field_csv(above.u_star));
  return out;
}

Outcome curve(const RunConfig& cfg) {
  Outcome out;
  const SpeedResult s = configured_speed(cfg);
  out.passed = true;
  out.summary = json{{"speed", to_json(s)}};
  out.csv.emplace_back("dispersion.csv", configured_dispersion_csv(cfg));
  return out;
}

}  // namespace

SpeedResult configured_speed(const RunConfig& cfg) {
  DispersionRelation rel = closed_form_relation(cfg.op, cfg.experiment.xi, cfg.reaction.base(0.0));
  rel.mu_max = cfg.experiment.mu_max;
  return minimize_speed(rel);
}

std::string configured_dispersion_csv(const RunConfig& cfg) {
  const DispersionRelation rel = closed_form_relation(cfg.op, cfg.experiment.xi, cfg.reaction.base(0.0));
  const double hi = cfg.experiment.mu_max;
  return dispersion_csv(rel, hi / cfg.experiment.mu_points, hi, cfg.experiment.mu_points);
}

RunReport run_experiment(const RunConfig& cfg, const RunOptions& options, std::ostream& log) {
  const auto start = std::chrono::steady_clock::now();
  const std::uint64_t seed = options.seed.value_or(cfg.seed);
  RunReport rep;
  rep.experiment = to_string(cfg.experiment.kind);
  if (!options.quiet) log << "kpplab: running " << rep.experiment << " (" << cfg.source << ")\n";

  Outcome out;
  switch (cfg.experiment.kind) {
    case ExperimentKind::front_speed: out = front_speed(cfg); break;
    case ExperimentKind::inhomogeneity_sweep: out = sweep(cfg, std::max(1u, options.jobs)); break;
    case ExperimentKind::spreading_clause: out = clause(cfg); break;
    case ExperimentKind::stationary: out = stationary(cfg, seed); break;
    case ExperimentKind::dispersion_curve: out = curve(cfg); break;
  }
  rep.passed = out.passed;
  if (cfg.experiment.expect == Expectation::fail)
    rep.verdict = out.passed ? "expected-fail: NOT confirmed" : "expected-fail: confirmed";
  else
    rep.verdict = out.passed ? "pass" : "fail";
  rep.exit_code = rep.verdict == "pass" ? exit_pass : exit_verdict_fail;

  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  rep.summary = out.summary;
  rep.summary["experiment"] = rep.experiment;
  rep.summary["checks_passed"] = out.passed;
  rep.summary["verdict"] = rep.verdict;

  if (options.write_artifacts) {
    const std::string dir = options.output_dir.value_or(cfg.output.directory);
    ArtifactDir art(dir);
    if (cfg.output.csv)
      for (const auto& [name, content] : out.csv) art.write(name, content);
    if (cfg.output.json) art.write_json("summary.json", rep.summary);
    const json manifest{{"tool", "kpplab"},
                        {"version", kVersion},
                        {"compiler", __VERSION__},
                        {"json_library", "nlohmann/json 3.11.3"},
                        {"config_source", cfg.source},
                        {"config_hash", content_hash(cfg.text)},
                        {"config_text", cfg.text},
                        {"seed", seed},
                        {"jobs", options.jobs},
                        {"experiment", rep.experiment},
                        {"habitat", to_json(cfg.habitat)},
                        {"reaction", to_json(cfg.reaction)},
                        {"dispersal", to_json(cfg.op)},
                        {"scheme", to_string(cfg.scheme)},
                        {"dt", cfg.dt},
                        {"T", cfg.T},
                        {"record_interval", cfg.record_interval},
                        {"verdict", rep.verdict},
                        {"wall_time_seconds", wall}};
    art.write_json("manifest.json", manifest);
    rep.directory = art.commit();
  }
  if (!options.quiet) {
    log << "kpplab: verdict " << rep.verdict;
    if (!rep.directory.empty()) log << ", artifacts in " << rep.directory.string();
    log << "\n";
  }
  return rep;
}

}  // namespace kpplab

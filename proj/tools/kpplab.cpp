#include <cstdio>
#include <iostream>

#include "CLI11.hpp"
#include "kpplab/error.hpp"
#include "kpplab/io.hpp"
#include "kpplab/runner.hpp"

using namespace kpplab;

namespace {

struct Common {
  unsigned jobs = 1;
  std::string output_dir;
  std::int64_t seed = -1;
  bool quiet = false;
};

RunOptions options_from(const Common& c) {
  RunOptions o;
  o.jobs = c.jobs;
  if (!c.output_dir.empty()) o.output_dir = c.output_dir;
  if (c.seed >= 0) o.seed = static_cast<std::uint64_t>(c.seed);
  o.quiet = c.quiet;
  return o;
}

const char* describe(const std::string& name) {
  if (name == "front_speed") return "front-like initial data; empirical front speed and spreading cones";
  if (name == "inhomogeneity_sweep") return "front speed across localized amplitudes A, against the homogeneous speed";
  if (name == "spreading_clause") return "compact/strip initial data; one spreading clause (1-4) checked on expanding regions";
  if (name == "stationary") return "positive stationary solution from above and below, tail and stability checks";
  if (name == "dispersion_curve") return "closed-form dispersion relation lambda(mu) and the minimal speed";
  return "";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kpplab: spreading speeds for KPP equations with localized inhomogeneity"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--jobs", common.jobs, "Concurrent experiment cells")->check(CLI::PositiveNumber);
  app.add_option("--output-dir", common.output_dir, "Artifact directory (overrides output.directory)");
  app.add_option("--seed", common.seed, "Seed for randomized fixtures (overrides the config seed)");
  app.add_flag("--quiet", common.quiet, "Suppress progress messages");

  std::string config;
  auto* run = app.add_subcommand("run", "Run the configured experiment and write artifacts");
  auto* speed = app.add_subcommand("speed", "Print the theoretical spreading speed as JSON");
  auto* eigen = app.add_subcommand("eigen", "Print the dispersion curve (mu, lambda, lambda/mu) as CSV");
  auto* stat = app.add_subcommand("stationary", "Compute the stationary solution for the configured model");
  auto* list = app.add_subcommand("list-experiments", "List experiment names");
  auto* validate = app.add_subcommand("validate", "Check a config file against the schema");
  for (auto* sub : {run, speed, eigen, stat, validate}) sub->add_option("config", config, "Config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_pass : exit_schema;
  }

  if (list->parsed()) {
    for (const std::string& name : experiment_names()) std::cout << name << "  " << describe(name) << "\n";
    return exit_pass;
  }

  RunConfig cfg;
  try {
    cfg = load_config(config);
  } catch (const Error& e) {
    std::cerr << "kpplab: " << e.what() << "\n";
    return exit_schema;
  }

  try {
    if (validate->parsed()) {
      if (!common.quiet) std::cout << config << ": ok (" << to_string(cfg.experiment.kind) << ")\n";
      return exit_pass;
    }
    if (speed->parsed()) {
      nlohmann::json j = to_json(configured_speed(cfg));
      j["direction"] = {cfg.experiment.xi[0], cfg.experiment.xi[1]};
      j["dispersal"] = to_json(cfg.op);
      std::cout << j.dump(2) << "\n";
      return exit_pass;
    }
    if (eigen->parsed()) {
      std::cout << configured_dispersion_csv(cfg);
      return exit_pass;
    }
    if (stat->parsed()) cfg.experiment.kind = ExperimentKind::stationary;
    const RunReport rep = run_experiment(cfg, options_from(common), std::cerr);
    if (!common.quiet) std::cout << rep.summary.dump(2) << "\n";
    return rep.exit_code;
  } catch (const Error& e) {
    std::cerr << "kpplab: " << e.what() << "\n";
    return e.kind() == ErrorKind::config ? exit_schema : exit_runtime;
  } catch (const std::exception& e) {
    std::cerr << "kpplab: " << e.what() << "\n";
    return exit_runtime;
  }
}

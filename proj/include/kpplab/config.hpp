#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kpplab/dynamics.hpp"
#include "kpplab/experiments.hpp"
#include "kpplab/kernel.hpp"

namespace kpplab {

// Raw INI contents: section -> key -> (value, line). Keys before the first
// section header live in section "".
struct IniEntry {
  std::string value;
  int line = 0;
};

struct IniDocument {
  std::string source;
  std::map<std::string, std::map<std::string, IniEntry>> sections;
  bool has(const std::string& section) const { return sections.count(section) > 0; }
};

// '#' and ';' start comments; blank lines are ignored. Duplicate keys and
// malformed lines are reported with their line number.
IniDocument parse_ini(const std::string& text, const std::string& source = "<config>");

// Applies KPPLAB_<SECTION>_<KEY> environment overrides (upper case, e.g.
// KPPLAB_SOLVER_T=50). KPPLAB_SEED overrides the top-level seed. Only keys
// known to the schema are consulted.
void apply_env_overrides(IniDocument& doc);

enum class ExperimentKind { front_speed, inhomogeneity_sweep, spreading_clause, stationary, dispersion_curve };

const char* to_string(ExperimentKind kind);
std::vector<std::string> experiment_names();

enum class Expectation { pass, fail };

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::front_speed;
  Direction xi;
  double level_fraction = 0.5;
  double burn_in = 0.5;
  double margin = 0.2;
  double speed_factor = 1.0;   // scales the theoretical speed in cone checks
  double tolerance = 0.05;     // relative speed error allowed
  std::vector<double> amplitudes{-0.5, 0.0, 0.5, 1.0};
  int clause = 1;
  double plateau_radius = 5.0;
  double tail_radius = 0.0;    // 0 selects 4 L0
  double mu_max = 20.0;
  int mu_points = 200;
  Expectation expect = Expectation::pass;
};

struct OutputConfig {
  std::string directory = "kpplab-out";
  bool csv = true;
  bool json = true;
  bool trajectory = false;  // full (t, x, u) CSV; large
};

struct RunConfig {
  std::string source;
  std::string text;  // config text after overrides, for the manifest
  std::uint64_t seed = 0;
  Habitat habitat = Habitat::continuum(1, 1.0, 0.5);
  Reaction reaction = Reaction::linear(1.0, 1.0);
  DispersalOp op = DispersalOp::random();
  Scheme scheme = Scheme::rk4;
  double dt = 0.0;
  double T = 100.0;
  double record_interval = 0.5;
  ExperimentConfig experiment;
  OutputConfig output;

  ExperimentSetup setup() const;
};

// Schema-validates the document. Errors (kind config) carry the source,
// line and field path, e.g. "run.cfg:7: solver.dt: must be positive".
RunConfig build_config(const IniDocument& doc);
RunConfig load_config(const std::string& path, bool env_overrides = true);
RunConfig parse_config(const std::string& text, const std::string& source = "<config>");

// Canonical text of the effective configuration.
std::string render_config(const IniDocument& doc);

// 64-bit FNV-1a, hex encoded.
std::string content_hash(const std::string& text);

}  // namespace kpplab

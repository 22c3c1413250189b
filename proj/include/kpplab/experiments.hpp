#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "kpplab/dynamics.hpp"
#include "kpplab/speeds.hpp"
#include "kpplab/stationary.hpp"

namespace kpplab {

struct FrontTrace {
  std::vector<double> times;
  std::vector<double> positions;  // NaN where the level set is empty
  double level = 0.0;
  Direction xi;
  double boundary_position = 0.0;  // max x.xi on the habitat
  double guard = 0.0;              // dispersal reach + 10 h
};

// Per record: the largest x.xi with u(t,x) >= level, linearly interpolated
// along grid edges to the first neighbour below the level.
FrontTrace track_front(const Trajectory& traj, const Direction& xi, double level,
                       double dispersal_reach = 0.0);

struct SpeedEstimate {
  double slope = 0.0;
  double intercept = 0.0;
  double t_begin = 0.0;
  double t_end = 0.0;
  std::size_t samples = 0;
  double rms_residual = 0.0;
  double theoretical = std::numeric_limits<double>::quiet_NaN();
  double relative_error = std::numeric_limits<double>::quiet_NaN();
};

// Least-squares slope over [burn_in * T, T_safe], T_safe being the first
// time the front comes within `guard` of the boundary.
SpeedEstimate estimate_speed(const FrontTrace& trace, double burn_in_fraction = 0.5,
                             std::optional<double> theoretical = std::nullopt);

struct ConeVerdict {
  bool inside_ok = false;   // min u >= 0.5 u0 on x.xi <= (1 - m) c t
  bool outside_ok = false;  // max u <= 0.01 u0 on x.xi >= (1 + m) c t
  bool inside_evaluated = false;   // region nonempty at every final-quarter record
  bool outside_evaluated = false;
  double inside_min = 0.0;
  double outside_max = 0.0;
  bool passed() const { return inside_ok && outside_ok; }
};

// Spreading-speed cone test over the final quarter of the recorded times.
// A clause whose region is empty at some final record is not evaluated and
// counts as failed; empty_region is thrown only when both are empty.
ConeVerdict verify_spreading_cones(const Trajectory& traj, const Direction& xi, double c_theory,
                                   double u0_star, double margin = 0.2);

// Everything one spreading experiment needs.
struct ExperimentSetup {
  DispersalOp op = DispersalOp::random();
  Habitat habitat = Habitat::continuum(1, 1.0, 0.5);
  Reaction reaction = Reaction::linear(1.0, 1.0, 0.0, 2.0);
  Direction xi;
  double T = 100.0;
  double dt = 0.0;               // 0 selects the stability bound
  double record_interval = 0.5;
  double level_fraction = 0.5;   // front level as a fraction of u0
  double burn_in = 0.5;
  double margin = 0.2;
  double plateau_radius = 5.0;   // compact / strip initial data
};

// Desk-scale defaults per kind and dimension.
ExperimentSetup default_setup(DispersalKind kind, int dim = 1);
// Default setups used by the spreading-feature runs (shorter horizon, both directions).
ExperimentSetup spreading_setup(DispersalKind kind, int dim = 1);

// Sampled direction set: +-1 in 1-D, 8 equally spaced angles in 2-D.
std::vector<Direction> sample_directions(int dim);

struct SweepCell {
  double amplitude = 0.0;
  SpeedEstimate speed;
  ConeVerdict cones;           // at c_theory
  ConeVerdict cones_doubled;   // negative control, inside clause must fail
  ConeVerdict cones_halved;    // negative control, outside clause must fail
  double convergence_error = 0.0;  // max over x.xi <= c T / 2 of |u(T) - u*|
  FrontTrace trace;
};

struct SweepResult {
  DispersalKind kind = DispersalKind::random;
  double theoretical = 0.0;
  std::vector<SweepCell> cells;
  bool within_theory = false;   // every slope within 5% of theory
  bool pairwise = false;        // all slopes pairwise within 2%
  bool controls_fail = false;   // negative controls rejected
  bool cones_pass = false;
  bool converges = false;       // convergence_error < 0.05 u0 for every cell
  double max_relative_error = 0.0;
  double max_pairwise = 0.0;
  bool passed() const { return within_theory && pairwise && controls_fail && cones_pass && converges; }
};

// Empirical speeds under localized inhomogeneity of amplitude A, compared
// with the homogeneous theoretical speed. Cells run on `jobs` threads.
SweepResult run_inhomogeneity_sweep(const ExperimentSetup& setup, const std::vector<double>& amplitudes,
                                    unsigned jobs = 1);

enum class InitialShape { compact, strip };

struct SpreadingRun {
  Trajectory traj;
  Field u_star;
  double u0_star = 0.0;
  Direction xi;
  std::vector<Direction> directions;
  std::vector<double> speeds;  // theoretical c*(xi) for each sampled direction
  double margin = 0.2;
  InitialShape shape = InitialShape::compact;
  double speed_along(const Direction& d) const;
};

SpreadingRun run_spreading(const ExperimentSetup& setup, InitialShape shape);

struct ClauseVerdict {
  int clause = 0;
  double speed = 0.0;      // c used for the region
  double value = 0.0;      // measured max over the region
  double threshold = 0.0;
  bool passed = false;
};

// clause 1: max u on |x.xi| >= (1+m) c_max t <= 0.01 u0
// clause 2: max |u - u*| on |x.xi| <= (1-m) c_min t <= 0.05 u0
// clause 3: max u on |x| >= (1+m) sup c t <= 0.01 u0
// clause 4: max |u - u*| on |x| <= (1-m) inf c t <= 0.05 u0
// speed_factor scales the speed (negative controls).
ClauseVerdict evaluate_clause(const SpreadingRun& run, int clause, double speed_factor = 1.0);
ClauseVerdict run_spreading_features(const ExperimentSetup& setup, int clause,
                                     double speed_factor = 1.0);

}  // namespace kpplab

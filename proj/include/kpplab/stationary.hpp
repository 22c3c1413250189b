#pragma once

#include <vector>

#include "kpplab/dynamics.hpp"
#include "kpplab/eigen.hpp"

namespace kpplab {

struct Minorant {
  double period = 0.0;
  PeriodicCoefficient h;
  double min_margin = 0.0;  // min over the cell of f(x,0) - h(x)
};

// Smooth cutoff: 1 on [0,1], 0 on [2, inf), C-infinity in between.
double smooth_cutoff(double s);

// Periodic h <= f(.,0) with cell average >= f0(0) - eps:
//   h(x) = f0(0) - cutoff(|x|^2 / L0^2) (f0(0) - inf f(.,0))
// on a square cell whose side is the smallest grid multiple > 4 L0 meeting
// the average condition. min_points forces a larger cell.
Minorant periodic_minorant(const Reaction& reaction, double eps, const Habitat& habitat,
                           int min_points = 0);

struct SubSolution {
  Field value;          // delta * phi, phi the periodic eigenfunction with max 1
  double delta = 0.0;
  double period = 0.0;
  double lambda = 0.0;  // principal eigenvalue of the minorant at mu = 0
  int halvings = 0;
  double min_inequality = 0.0;  // min over x of A v + v f(x, v)
};

// Builds delta*phi from the minorant with eps = f0(0)/2 and validates
// A v + v f(x,v) >= -1e-10 pointwise, halving delta up to 10 times.
SubSolution sub_solution(const DispersalOp& op, const Reaction& reaction, const Habitat& habitat,
                         double delta = 0.1);

enum class Route { from_above, from_below };

const char* to_string(Route route);

struct StationaryResult {
  Field u_star;
  Route route = Route::from_above;
  double residual = 0.0;
  double time = 0.0;
  std::size_t records = 0;
  double last_change = 0.0;          // max norm of the final record-to-record change
  double monotonicity_violation = 0.0;  // worst step against the route's direction
  bool monotone = false;
  std::vector<Field> iterates;       // unit-spaced records when requested
};

struct StationaryOptions {
  double tol = 1e-9;
  double dt = 0.0;  // 0 selects the stability bound
  double t_max = 500.0;
  double sub_delta = 0.1;
  bool keep_iterates = false;
};

// Long-time integration from u0 = beta0 + 1 (from above) or from the
// validated sub-solution (from below) until successive unit-spaced records
// differ by less than tol.
StationaryResult solve_stationary(const DispersalOp& op, const Reaction& reaction,
                                  const Habitat& habitat, Route route,
                                  const StationaryOptions& options = {});

// sup over |x| in [R, L - delta0 - 5h] of |u*(x) - u0|.
double check_tail(const Field& u_star, double u0_star, double R, double dispersal_reach);

struct StabilityReport {
  std::vector<double> distances;
  double max_distance = 0.0;
  bool passed = false;
};

// Evolves each strictly positive perturbation to T and measures the max
// distance to u*; passes iff all are below 1e-4.
StabilityReport check_stability(const DispersalOp& op, const Reaction& reaction, const Field& u_star,
                                const std::vector<Field>& perturbations, double T = 200.0,
                                double dt = 0.0);

}  // namespace kpplab

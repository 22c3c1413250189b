#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "kpplab/dispersal.hpp"
#include "kpplab/reaction.hpp"

namespace kpplab {

enum class Scheme { explicit_euler, rk4 };

const char* to_string(Scheme scheme);

struct Trajectory {
  Habitat habitat;
  std::vector<double> times;
  std::vector<Field> snapshots;
  double dt = 0.0;
  Scheme scheme = Scheme::rk4;
  // Entries below -1e-14 that had to be clipped to zero.
  std::size_t clip_count = 0;

  const Field& initial() const { return snapshots.front(); }
  const Field& final() const { return snapshots.back(); }
  double final_time() const { return times.back(); }
};

// Largest step accepted by evolve for the given operator and reaction.
// u_max bounds the solution (max(max u0, beta0) + 1).
//   random:    h^2 / (2 dim (1 + 0.25))
//   nonlocal:  0.25 / (1 + max|f| + 1)
//   discrete:  0.25 / (sum a_k + max|f| + 1)
double stable_step_bound(const DispersalOp& op, const Habitat& habitat, const Reaction& reaction,
                         double u_max);
// Bound for initial data u0: u_max = max(max u0, beta0) + 1.
double stable_step_bound(const DispersalOp& op, const Reaction& reaction, const Field& u0);

// Explicit integrator for u_t = A u + u f(x,u) with its own state; advance in chunks.
class Integrator {
 public:
  Integrator(const DispersalOp& op, const Reaction& reaction, const Field& u0, double dt,
             Scheme scheme = Scheme::rk4);

  double time() const { return static_cast<double>(steps_) * dt_; }
  std::size_t steps() const { return steps_; }
  double dt() const { return dt_; }
  const Field& state() const { return state_; }
  std::size_t clip_count() const { return clips_; }

  void step();
  void advance(std::size_t n_steps);

  // A u + u f(x,u) evaluated on an arbitrary field.
  void rhs(std::span<const double> u, std::span<double> out) const;

 private:
  BoundDispersal dispersal_;
  Reaction reaction_;
  Field perturbation_;
  Field state_;
  double dt_;
  Scheme scheme_;
  std::size_t steps_ = 0;
  std::size_t clips_ = 0;
  std::vector<double> k1_, k2_, k3_, k4_, tmp_;
};

// Integrates to the first step count with time >= T, recording the initial
// state, every record_every-th step and the final step.
Trajectory evolve(const DispersalOp& op, const Reaction& reaction, const Field& u0, double T,
                  double dt, std::size_t record_every, Scheme scheme = Scheme::rk4);

// Stationary residual max|A u + u f(x,u)|.
double stationary_residual(const DispersalOp& op, const Reaction& reaction, const Field& u);

struct ComparisonReport {
  double max_violation = 0.0;  // max_t max_x (u1 - u2)^+
  double interior_gap = 0.0;   // u2 - u1 at the habitat centre, first record with t >= 1
  bool passed = false;
};

inline constexpr double kOrderTolerance = 5e-10;
inline constexpr double kPartMetricSlack = 1e-8;

ComparisonReport check_comparison(const Trajectory& lower, const Trajectory& upper);

// max |ln u - ln v|; both fields must be strictly positive.
double part_metric(const Field& u, const Field& v);

struct PartMetricReport {
  std::vector<double> times;
  std::vector<double> values;
  double max_increase = 0.0;
  std::vector<std::size_t> violations;  // indices k with rho_k > rho_{k-1} + slack
  bool passed = false;
};

PartMetricReport check_part_metric_decay(const DispersalOp& op, const Reaction& reaction,
                                         const Field& u0, const Field& v0, double T, double dt,
                                         std::size_t record_every = 1);
PartMetricReport part_metric_sequence(const Trajectory& a, const Trajectory& b);

enum class CheckStatus { passed, failed, input_error };

const char* to_string(CheckStatus status);

struct SuperSolutionReport {
  CheckStatus status = CheckStatus::input_error;
  double max_excess = 0.0;  // max over records of u - d e^{-mu (x.xi - c t)}
  std::string message;
};

// Checks u(t,x) <= d e^{-mu (x.xi - c t)} along the trajectory (slack 1e-8 d).
SuperSolutionReport check_exponential_supersolution(const Trajectory& traj, double d, double mu,
                                                    double c, const Direction& xi);

}  // namespace kpplab

#pragma once

#include <array>
#include <functional>
#include <vector>

#include "kpplab/dispersal.hpp"

namespace kpplab {

// A function sampled on one periodic cell of m_0 x m_1 points at spacing h.
// Sample positions are (i - floor(m/2)) h per axis, so the origin is a sample.
class PeriodicCoefficient {
 public:
  PeriodicCoefficient(int dim, std::array<int, kMaxDim> cell_points, double spacing,
                      std::vector<double> samples);
  static PeriodicCoefficient constant(int dim, int cell_points, double spacing, double value);
  static PeriodicCoefficient from_function(int dim, int cell_points, double spacing,
                                           const std::function<double(const Point&)>& fn);

  int dim() const { return dim_; }
  std::array<int, kMaxDim> cell_points() const { return m_; }
  double spacing() const { return h_; }
  double period(int axis) const { return m_[axis] * h_; }
  std::size_t size() const { return samples_.size(); }
  const std::vector<double>& samples() const { return samples_; }
  double operator[](std::size_t i) const { return samples_[i]; }
  Point position(std::size_t index) const;
  // Cell index of a position given in units of the spacing.
  std::size_t wrap_index(std::array<long, kMaxDim> grid_coords) const;

  double average() const;
  double min() const;
  double max() const;
  double oscillation() const { return max() - min(); }

 private:
  int dim_;
  std::array<int, kMaxDim> m_;
  double h_;
  std::vector<double> samples_;
};

// The twisted periodic operator u -> A_mu u + a u on one cell, stored as a
// constant stencil with wrap-around indexing plus a diagonal.
class CellOperator {
 public:
  CellOperator(const DispersalOp& op, double mu, const Direction& xi, const PeriodicCoefficient& a);

  DispersalKind kind() const { return kind_; }
  double mu() const { return mu_; }
  std::size_t size() const { return diag_.size(); }
  const PeriodicCoefficient& coefficient() const { return a_; }

  void apply(std::span<const double> u, std::span<double> out) const;
  double max_abs_diagonal() const;
  double min_off_diagonal() const;

 private:
  DispersalKind kind_;
  double mu_;
  PeriodicCoefficient a_;
  std::vector<double> diag_;
  std::vector<double> coeff_;                // per stencil entry
  std::vector<std::size_t> neighbours_;      // size() x coeff_.size()
};

struct EigenResult {
  double lambda = 0.0;
  PeriodicCoefficient eigenfunction;  // positive, max 1
  double residual = 0.0;              // max |O phi - lambda phi|
  std::size_t iterations = 0;
  double shift = 0.0;
};

inline constexpr double kEigenTolerance = 1e-10;
inline constexpr std::size_t kEigenMaxIter = 50000;

// Shifted power iteration on O + sI with s = 1 + max|diag O|; stops when
// max|O phi - lambda phi| <= tolerance * max(1, lambda + s), phi scaled to max 1.
EigenResult principal_eigen(const CellOperator& op, double tolerance = kEigenTolerance,
                            std::size_t max_iter = kEigenMaxIter);

// Principal eigenvalue for a constant coefficient r:
//   random    r + mu^2
//   nonlocal  int e^{-mu z.xi} kappa(z) dz - 1 + r
//   discrete  sum_k a_k (e^{-mu k.xi} - 1) + r
double lambda_closed_form(const DispersalOp& op, double mu, const Direction& xi, double r);
// The same with the grid-sampled kernel in place of the continuous one.
double lambda_discrete_symbol(const DispersalOp& op, double mu, const Direction& xi, double r);

struct ExistenceReport {
  bool condition2_ok = false;
  double gap = 0.0;        // max a - min a
  double threshold = 0.0;  // inf over sampled xi of the kernel mass on z.xi <= 0
};

// Sufficient condition for a nonlocal principal eigenvalue: oscillation of a
// below the half-space kernel mass. Directions: +-1 in 1-D, 64 angles in 2-D.
ExistenceReport check_pe_existence(const PeriodicCoefficient& a, const Kernel& kernel);

struct AverageBoundReport {
  double lambda = 0.0;          // principal eigenvalue for a
  double lambda_averaged = 0.0; // closed form at the cell average of a
  bool passed = false;
};

AverageBoundReport check_average_lower_bound(const DispersalOp& op, double mu, const Direction& xi,
                                             const PeriodicCoefficient& a);

}  // namespace kpplab

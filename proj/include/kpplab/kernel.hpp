#pragma once

#include <array>
#include <functional>
#include <vector>

#include "kpplab/habitat.hpp"

namespace kpplab {

// Radial kernel profiles, all supported on |z| < delta0.
enum class KernelProfile {
  uniform,  // constant
  tent,     // 1 - |z|/delta0
  smooth,   // exp(1 - 1/(1 - (|z|/delta0)^2))
};

using Offset = std::array<int, kMaxDim>;

// Nonnegative dispersal kernel kappa with unit mass, plus its grid sampling at
// a given spacing. Discrete weights already include the cell volume h^dim and
// are renormalized to sum to one.
class Kernel {
 public:
  Kernel(KernelProfile profile, double delta0, int dim, double spacing);

  KernelProfile profile() const { return profile_; }
  double delta0() const { return delta0_; }
  int dim() const { return dim_; }
  double spacing() const { return spacing_; }

  // Continuous density (integrates to 1 over R^dim).
  double density(double norm) const;

  const std::vector<Offset>& offsets() const { return offsets_; }
  const std::vector<double>& weights() const { return weights_; }
  // Largest |offset component| in grid points.
  int reach() const { return reach_; }

  // The same profile resampled at another spacing.
  Kernel resampled(double spacing) const { return Kernel(profile_, delta0_, dim_, spacing); }

  // int e^{-mu z.xi} kappa(z) dz by composite Gauss-Legendre on the
  // continuous profile.
  double exponential_moment(double mu, const Direction& xi) const;
  // Same moment from the discrete weights.
  double discrete_exponential_moment(double mu, const Direction& xi) const;
  // Discrete mass on the half space z.xi <= 0 (weights on z.xi == 0 count half).
  double half_mass(const Direction& xi) const;

 private:
  double shape(double s) const;

  KernelProfile profile_;
  double delta0_;
  int dim_;
  double spacing_;
  double norm_const_;
  int reach_;
  std::vector<Offset> offsets_;
  std::vector<double> weights_;
};

// Composite 5-point Gauss-Legendre on [a, b].
double gauss_legendre(const std::function<double(double)>& f, double a, double b, int panels);

// Neumaier-compensated sum.
double compensated_sum(std::span<const double> values);

}  // namespace kpplab

#pragma once

#include <optional>
#include <span>
#include <vector>

#include "kpplab/habitat.hpp"
#include "kpplab/kernel.hpp"

namespace kpplab {

// Nearest-neighbour rates a_k, ordered (+e_0, -e_0, +e_1, -e_1, ...).
class LatticeWeights {
 public:
  explicit LatticeWeights(std::vector<double> rates);
  static LatticeWeights uniform(int dim, double rate = 1.0);

  int dim() const { return static_cast<int>(rates_.size() / 2); }
  double rate(int axis, int sign) const { return rates_[2 * axis + (sign > 0 ? 0 : 1)]; }
  const std::vector<double>& rates() const { return rates_; }
  double total() const;

 private:
  std::vector<double> rates_;
};

enum class DispersalKind { random, nonlocal, discrete };

const char* to_string(DispersalKind kind);

class DispersalOp {
 public:
  static DispersalOp random() { return DispersalOp(DispersalKind::random, std::nullopt, std::nullopt); }
  static DispersalOp nonlocal(Kernel kernel) {
    return DispersalOp(DispersalKind::nonlocal, std::move(kernel), std::nullopt);
  }
  static DispersalOp discrete(LatticeWeights weights) {
    return DispersalOp(DispersalKind::discrete, std::nullopt, std::move(weights));
  }

  DispersalKind kind() const { return kind_; }
  const Kernel& kernel() const;
  const LatticeWeights& lattice_weights() const;

  // Throws habitat_mismatch unless the habitat suits this operator.
  void check_habitat(const Habitat& habitat) const;
  // Support radius of the dispersal in habitat units (0 for random).
  double reach(const Habitat& habitat) const;

 private:
  DispersalOp(DispersalKind kind, std::optional<Kernel> kernel, std::optional<LatticeWeights> weights)
      : kind_(kind), kernel_(std::move(kernel)), weights_(std::move(weights)) {}

  DispersalKind kind_;
  std::optional<Kernel> kernel_;
  std::optional<LatticeWeights> weights_;
};

// A dispersal operator bound to one habitat, with boundary data precomputed.
// Clamp boundaries copy the nearest in-domain value into ghost points; the
// nonlocal integral is restricted to in-domain points and renormalized per row.
class BoundDispersal {
 public:
  BoundDispersal(DispersalOp op, Habitat habitat);

  const DispersalOp& op() const { return op_; }
  const Habitat& habitat() const { return habitat_; }

  void apply(std::span<const double> u, std::span<double> out) const;
  // Exponentially twisted operator e^{mu x.xi} A e^{-mu x.xi}.
  void apply_twisted(double mu, const Direction& xi, std::span<const double> u,
                     std::span<double> out) const;

 private:
  void apply_random(double mu, const Direction& xi, std::span<const double> u, std::span<double> out) const;
  void apply_nonlocal(double mu, const Direction& xi, std::span<const double> u, std::span<double> out) const;
  void apply_discrete(double mu, const Direction& xi, std::span<const double> u, std::span<double> out) const;

  DispersalOp op_;
  Habitat habitat_;
  std::vector<long> linear_offsets_;  // nonlocal only
  std::vector<double> inv_row_mass_;  // nonlocal + clamp only
};

Field apply(const DispersalOp& op, const Field& u);
Field apply_twisted(const DispersalOp& op, double mu, const Direction& xi, const Field& u);

}  // namespace kpplab

#include "kpplab/dispersal.hpp"

#include <cmath>
#include <numeric>

#include "kpplab/error.hpp"

namespace kpplab {

LatticeWeights::LatticeWeights(std::vector<double> rates) : rates_(std::move(rates)) {
  if (rates_.empty() || rates_.size() % 2 != 0 || rates_.size() > 2 * kMaxDim)
    throw Error(ErrorKind::invalid_argument, "lattice weights need 2N rates for N = 1 or 2");
  for (double a : rates_)
    if (!(a > 0.0) || !std::isfinite(a))
      throw Error(ErrorKind::invalid_argument, "lattice rates must be positive");
}

LatticeWeights LatticeWeights::uniform(int dim, double rate) {
  return LatticeWeights(std::vector<double>(2 * dim, rate));
}

double LatticeWeights::total() const { return std::accumulate(rates_.begin(), rates_.end(), 0.0); }

const char* to_string(DispersalKind kind) {
  switch (kind) {
    case DispersalKind::random: return "random";
    case DispersalKind::nonlocal: return "nonlocal";
    case DispersalKind::discrete: return "discrete";
  }
  return "?";
}

const Kernel& DispersalOp::kernel() const {
  if (!kernel_) throw Error(ErrorKind::invalid_argument, "operator has no kernel");
  return *kernel_;
}

const LatticeWeights& DispersalOp::lattice_weights() const {
  if (!weights_) throw Error(ErrorKind::invalid_argument, "operator has no lattice weights");
  return *weights_;
}

void DispersalOp::check_habitat(const Habitat& habitat) const {
  switch (kind_) {
    case DispersalKind::random:
      if (habitat.kind() != HabitatKind::continuum)
        throw Error(ErrorKind::habitat_mismatch, "random dispersal needs a continuum habitat");
      break;
    case DispersalKind::nonlocal:
      if (habitat.kind() != HabitatKind::continuum)
        throw Error(ErrorKind::habitat_mismatch, "nonlocal dispersal needs a continuum habitat");
      if (kernel_->dim() != habitat.dim())
        throw Error(ErrorKind::habitat_mismatch, "kernel dimension differs from habitat");
      if (std::abs(kernel_->spacing() - habitat.spacing()) > 1e-12 * habitat.spacing())
        throw Error(ErrorKind::habitat_mismatch, "kernel sampled at a different spacing");
      if (kernel_->reach() >= habitat.axis_points())
        throw Error(ErrorKind::habitat_mismatch, "kernel wider than the habitat");
      break;
    case DispersalKind::discrete:
      if (habitat.kind() != HabitatKind::lattice)
        throw Error(ErrorKind::habitat_mismatch, "discrete dispersal needs a lattice habitat");
      if (weights_->dim() != habitat.dim())
        throw Error(ErrorKind::habitat_mismatch, "lattice weights dimension differs from habitat");
      break;
  }
}

double DispersalOp::reach(const Habitat& habitat) const {
  switch (kind_) {
    case DispersalKind::random: return 0.0;
    case DispersalKind::nonlocal: return kernel_->delta0();
    case DispersalKind::discrete: return habitat.spacing();
  }
  return 0.0;
}

namespace {

// Grid viewed as outer x inner; a 1-D habitat has a single outer row.
struct GridShape {
  int outer;
  int inner;
  long outer_stride;
  bool periodic;
};

GridShape shape_of(const Habitat& h) {
  const int n = h.axis_points();
  return GridShape{h.dim() == 2 ? n : 1, n, n, h.boundary() == Boundary::periodic};
}

// Neighbour coordinate along one axis; clamp returns the point itself.
inline int step(int a, int d, int n, bool periodic) {
  const int b = a + d;
  if (b >= 0 && b < n) return b;
  if (!periodic) return a;
  return ((b % n) + n) % n;
}

void check_sizes(const Habitat& h, std::span<const double> u, std::span<double> out) {
  if (u.size() != h.size() || out.size() != h.size())
    throw Error(ErrorKind::habitat_mismatch, "field size does not match habitat");
}

}  // namespace

BoundDispersal::BoundDispersal(DispersalOp op, Habitat habitat)
    : op_(std::move(op)), habitat_(std::move(habitat)) {
  op_.check_habitat(habitat_);
  if (op_.kind() != DispersalKind::nonlocal) return;

  const Kernel& k = op_.kernel();
  const GridShape g = shape_of(habitat_);
  for (const Offset& o : k.offsets())
    linear_offsets_.push_back(habitat_.dim() == 2 ? o[0] * g.outer_stride + o[1] : o[0]);

  if (g.periodic) return;
  inv_row_mass_.assign(habitat_.size(), 1.0);
  const int r = k.reach();
  for (int a0 = 0; a0 < g.outer; ++a0) {
    for (int a1 = 0; a1 < g.inner; ++a1) {
      const bool interior = a1 >= r && a1 < g.inner - r &&
                            (habitat_.dim() == 1 || (a0 >= r && a0 < g.outer - r));
      if (interior) continue;
      double mass = 0.0;
      for (std::size_t s = 0; s < k.offsets().size(); ++s) {
        const Offset& o = k.offsets()[s];
        const int b0 = habitat_.dim() == 2 ? a0 + o[0] : a0;
        const int b1 = habitat_.dim() == 2 ? a1 + o[1] : a1 + o[0];
        if (b0 >= 0 && b0 < g.outer && b1 >= 0 && b1 < g.inner) mass += k.weights()[s];
      }
      inv_row_mass_[static_cast<std::size_t>(a0) * g.inner + a1] = 1.0 / mass;
    }
  }
}

void BoundDispersal::apply(std::span<const double> u, std::span<double> out) const {
  apply_twisted(0.0, Direction::axis(habitat_.dim(), 0), u, out);
}

void BoundDispersal::apply_twisted(double mu, const Direction& xi, std::span<const double> u,
                                   std::span<double> out) const {
  check_sizes(habitat_, u, out);
  if (!std::isfinite(mu)) throw Error(ErrorKind::invalid_argument, "twist must be finite");
  switch (op_.kind()) {
    case DispersalKind::random: apply_random(mu, xi, u, out); break;
    case DispersalKind::nonlocal: apply_nonlocal(mu, xi, u, out); break;
    case DispersalKind::discrete: apply_discrete(mu, xi, u, out); break;
  }
}

void BoundDispersal::apply_random(double mu, const Direction& xi, std::span<const double> u,
                                  std::span<double> out) const {
  const GridShape g = shape_of(habitat_);
  const double h = habitat_.spacing();
  const double inv_h2 = 1.0 / (h * h);
  const double mu2 = mu * mu;
  const bool two_d = habitat_.dim() == 2;
  // Gradient coefficients: -2 mu xi_d / (2h) for each axis (inner axis is the last one).
  const double g_inner = -mu * xi[two_d ? 1 : 0] / h;
  const double g_outer = two_d ? -mu * xi[0] / h : 0.0;
  const bool twisted = mu != 0.0;

#pragma omp parallel for schedule(static) if (g.outer > 64)
  for (int a0 = 0; a0 < g.outer; ++a0) {
    const long row = static_cast<long>(a0) * g.inner;
    const long up = two_d ? static_cast<long>(step(a0, -1, g.outer, g.periodic)) * g.inner : row;
    const long dn = two_d ? static_cast<long>(step(a0, +1, g.outer, g.periodic)) * g.inner : row;
    for (int a1 = 0; a1 < g.inner; ++a1) {
      const int l = (a1 > 0) ? a1 - 1 : step(a1, -1, g.inner, g.periodic);
      const int r = (a1 < g.inner - 1) ? a1 + 1 : step(a1, +1, g.inner, g.periodic);
      const double c = u[row + a1];
      const double ul = u[row + l], ur = u[row + r];
      double lap = (ul - 2.0 * c + ur) * inv_h2;
      if (two_d) {
        const double uu = u[up + a1], ud = u[dn + a1];
        lap += (uu - 2.0 * c + ud) * inv_h2;
        if (twisted) lap += g_outer * (ud - uu);
      }
      if (twisted) lap += g_inner * (ur - ul) + mu2 * c;
      out[row + a1] = lap;
    }
  }
}

void BoundDispersal::apply_nonlocal(double mu, const Direction& xi, std::span<const double> u,
                                    std::span<double> out) const {
  const Kernel& k = op_.kernel();
  const GridShape g = shape_of(habitat_);
  const bool two_d = habitat_.dim() == 2;
  const int r = k.reach();
  const std::size_t m = k.offsets().size();

  std::vector<double> w(k.weights());
  if (mu != 0.0) {
    const double h = habitat_.spacing();
    for (std::size_t s = 0; s < m; ++s) {
      const Offset& o = k.offsets()[s];
      const double proj = two_d ? h * (o[0] * xi[0] + o[1] * xi[1]) : h * o[0] * xi[0];
      w[s] *= std::exp(-mu * proj);
    }
  }

#pragma omp parallel for schedule(static) if (g.outer > 64)
  for (int a0 = 0; a0 < g.outer; ++a0) {
    const bool row_interior = !two_d || (a0 >= r && a0 < g.outer - r);
    for (int a1 = 0; a1 < g.inner; ++a1) {
      const long idx = static_cast<long>(a0) * g.inner + a1;
      double acc = 0.0;
      if (row_interior && a1 >= r && a1 < g.inner - r) {
        for (std::size_t s = 0; s < m; ++s) acc += w[s] * u[idx + linear_offsets_[s]];
        out[idx] = acc - u[idx];
        continue;
      }
      for (std::size_t s = 0; s < m; ++s) {
        const Offset& o = k.offsets()[s];
        int b0 = two_d ? a0 + o[0] : a0;
        int b1 = two_d ? a1 + o[1] : a1 + o[0];
        if (g.periodic) {
          b0 = ((b0 % g.outer) + g.outer) % g.outer;
          b1 = ((b1 % g.inner) + g.inner) % g.inner;
        } else if (b0 < 0 || b0 >= g.outer || b1 < 0 || b1 >= g.inner) {
          continue;
        }
        acc += w[s] * u[static_cast<long>(b0) * g.inner + b1];
      }
      if (!g.periodic) acc *= inv_row_mass_[idx];
      out[idx] = acc - u[idx];
    }
  }
}

void BoundDispersal::apply_discrete(double mu, const Direction& xi, std::span<const double> u,
                                    std::span<double> out) const {
  const LatticeWeights& a = op_.lattice_weights();
  const GridShape g = shape_of(habitat_);
  const bool two_d = habitat_.dim() == 2;
  const int inner_axis = two_d ? 1 : 0;
  // a_k e^{-mu k.xi} for k = +e, -e along each axis.
  const double ip = a.rate(inner_axis, +1) * std::exp(-mu * xi[inner_axis]);
  const double im = a.rate(inner_axis, -1) * std::exp(mu * xi[inner_axis]);
  const double isum = a.rate(inner_axis, +1) + a.rate(inner_axis, -1);
  const double op = two_d ? a.rate(0, +1) * std::exp(-mu * xi[0]) : 0.0;
  const double om = two_d ? a.rate(0, -1) * std::exp(mu * xi[0]) : 0.0;
  const double osum = two_d ? a.rate(0, +1) + a.rate(0, -1) : 0.0;

  for (int a0 = 0; a0 < g.outer; ++a0) {
    const long row = static_cast<long>(a0) * g.inner;
    const int up0 = two_d ? step(a0, +1, g.outer, g.periodic) : a0;
    const int dn0 = two_d ? step(a0, -1, g.outer, g.periodic) : a0;
    for (int a1 = 0; a1 < g.inner; ++a1) {
      const double c = u[row + a1];
      // Ghost neighbours outside a clamped domain equal the centre value.
      const int rp = step(a1, +1, g.inner, g.periodic);
      const int rm = step(a1, -1, g.inner, g.periodic);
      double acc = ip * u[row + rp] + im * u[row + rm] - isum * c;
      if (two_d) acc += op * u[static_cast<long>(up0) * g.inner + a1] +
                        om * u[static_cast<long>(dn0) * g.inner + a1] - osum * c;
      out[row + a1] = acc;
    }
  }
}

Field apply(const DispersalOp& op, const Field& u) {
  BoundDispersal bound(op, u.habitat);
  Field out(u.habitat);
  bound.apply(u.view(), out.view());
  return out;
}

Field apply_twisted(const DispersalOp& op, double mu, const Direction& xi, const Field& u) {
  BoundDispersal bound(op, u.habitat);
  Field out(u.habitat);
  bound.apply_twisted(mu, xi, u.view(), out.view());
  return out;
}

}  // namespace kpplab

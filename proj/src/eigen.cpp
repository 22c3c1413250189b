#include "kpplab/eigen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include "kpplab/error.hpp"

namespace kpplab {

PeriodicCoefficient::PeriodicCoefficient(int dim, std::array<int, kMaxDim> cell_points,
                                         double spacing, std::vector<double> samples)
    : dim_(dim), m_(cell_points), h_(spacing), samples_(std::move(samples)) {
  if (dim < 1 || dim > kMaxDim) throw Error(ErrorKind::invalid_argument, "cell dim must be 1 or 2");
  if (!(spacing > 0.0)) throw Error(ErrorKind::invalid_argument, "cell spacing must be positive");
  if (dim == 1) m_[1] = 1;
  std::size_t n = 1;
  for (int d = 0; d < dim; ++d) {
    if (m_[d] < 1) throw Error(ErrorKind::invalid_argument, "cell needs at least one point per axis");
    n *= static_cast<std::size_t>(m_[d]);
  }
  if (samples_.size() != n) throw Error(ErrorKind::invalid_argument, "sample count does not match cell");
  for (double v : samples_)
    if (!std::isfinite(v)) throw Error(ErrorKind::invalid_argument, "coefficient must be finite");
}

PeriodicCoefficient PeriodicCoefficient::constant(int dim, int cell_points, double spacing,
                                                  double value) {
  const std::size_t n = dim == 2 ? static_cast<std::size_t>(cell_points) * cell_points
                                 : static_cast<std::size_t>(cell_points);
  return PeriodicCoefficient(dim, {cell_points, cell_points}, spacing, std::vector<double>(n, value));
}

PeriodicCoefficient PeriodicCoefficient::from_function(int dim, int cell_points, double spacing,
                                                       const std::function<double(const Point&)>& fn) {
  PeriodicCoefficient c = constant(dim, cell_points, spacing, 0.0);
  for (std::size_t i = 0; i < c.samples_.size(); ++i) c.samples_[i] = fn(c.position(i));
  return c;
}

Point PeriodicCoefficient::position(std::size_t index) const {
  if (dim_ == 1) return {(static_cast<long>(index) - m_[0] / 2) * h_, 0.0};
  const long i0 = static_cast<long>(index / m_[1]);
  const long i1 = static_cast<long>(index % m_[1]);
  return {(i0 - m_[0] / 2) * h_, (i1 - m_[1] / 2) * h_};
}

std::size_t PeriodicCoefficient::wrap_index(std::array<long, kMaxDim> g) const {
  auto wrap = [](long v, int m) { return static_cast<std::size_t>(((v + m / 2) % m + m) % m); };
  if (dim_ == 1) return wrap(g[0], m_[0]);
  return wrap(g[0], m_[0]) * static_cast<std::size_t>(m_[1]) + wrap(g[1], m_[1]);
}

double PeriodicCoefficient::average() const {
  return std::accumulate(samples_.begin(), samples_.end(), 0.0) / static_cast<double>(samples_.size());
}
double PeriodicCoefficient::min() const { return *std::min_element(samples_.begin(), samples_.end()); }
double PeriodicCoefficient::max() const { return *std::max_element(samples_.begin(), samples_.end()); }

namespace {
struct StencilEntry {
  std::array<int, kMaxDim> offset;
  double coeff;
};
}  // namespace

CellOperator::CellOperator(const DispersalOp& op, double mu, const Direction& xi,
                           const PeriodicCoefficient& a)
    : kind_(op.kind()), mu_(mu), a_(a) {
  if (!std::isfinite(mu)) throw Error(ErrorKind::invalid_argument, "mu must be finite");
  if (xi.dim() != a.dim()) throw Error(ErrorKind::invalid_argument, "direction and cell dims differ");
  const int dim = a.dim();
  const double h = a.spacing();
  const auto m = a.cell_points();

  std::vector<StencilEntry> stencil;
  double centre = 0.0;
  switch (kind_) {
    case DispersalKind::random: {
      for (int d = 0; d < dim; ++d)
        if (m[d] < 8)
          throw Error(ErrorKind::resolution_too_coarse, "need at least 8 points per period");
      const double inv_h2 = 1.0 / (h * h);
      centre = -2.0 * dim * inv_h2 + mu * mu;
      for (int d = 0; d < dim; ++d) {
        std::array<int, kMaxDim> plus{0, 0}, minus{0, 0};
        plus[d] = 1;
        minus[d] = -1;
        // Delta u - 2 mu xi.grad u with central differences.
        stencil.push_back({plus, inv_h2 - mu * xi[d] / h});
        stencil.push_back({minus, inv_h2 + mu * xi[d] / h});
      }
      break;
    }
    case DispersalKind::nonlocal: {
      const Kernel& k0 = op.kernel();
      if (k0.dim() != dim) throw Error(ErrorKind::invalid_argument, "kernel and cell dims differ");
      const Kernel k = std::abs(k0.spacing() - h) > 1e-12 * h ? k0.resampled(h) : k0;
      for (int d = 0; d < dim; ++d)
        if (!(m[d] * h > 2.0 * k.delta0()))
          throw Error(ErrorKind::resolution_too_coarse, "nonlocal cell period must exceed 2 delta0");
      centre = -1.0;
      for (std::size_t s = 0; s < k.offsets().size(); ++s) {
        const Offset& o = k.offsets()[s];
        const double proj = h * (o[0] * xi[0] + (dim == 2 ? o[1] * xi[1] : 0.0));
        stencil.push_back({{o[0], dim == 2 ? o[1] : 0}, k.weights()[s] * std::exp(-mu * proj)});
      }
      break;
    }
    case DispersalKind::discrete: {
      const LatticeWeights& w = op.lattice_weights();
      if (w.dim() != dim) throw Error(ErrorKind::invalid_argument, "lattice weights and cell dims differ");
      centre = -w.total();
      for (int d = 0; d < dim; ++d) {
        std::array<int, kMaxDim> plus{0, 0}, minus{0, 0};
        plus[d] = 1;
        minus[d] = -1;
        stencil.push_back({plus, w.rate(d, +1) * std::exp(-mu * xi[d])});
        stencil.push_back({minus, w.rate(d, -1) * std::exp(mu * xi[d])});
      }
      break;
    }
  }

  // Entries landing on the cell centre (offset multiple of the period) fold into the diagonal.
  const std::size_t n = a.size();
  diag_.assign(n, centre);
  for (std::size_t i = 0; i < n; ++i) diag_[i] += a[i];
  std::vector<StencilEntry> off;
  for (const auto& e : stencil) {
    bool self = true;
    for (int d = 0; d < dim; ++d) self = self && (e.offset[d] % m[d] == 0);
    if (self) {
      for (double& v : diag_) v += e.coeff;
    } else {
      off.push_back(e);
    }
  }
  coeff_.reserve(off.size());
  for (const auto& e : off) coeff_.push_back(e.coeff);
  neighbours_.resize(n * off.size());
  for (std::size_t i = 0; i < n; ++i) {
    const Point p = a.position(i);
    std::array<long, kMaxDim> g{std::lround(p[0] / h), std::lround(p[1] / h)};
    for (std::size_t s = 0; s < off.size(); ++s)
      neighbours_[i * off.size() + s] =
          a.wrap_index({g[0] + off[s].offset[0], dim == 2 ? g[1] + off[s].offset[1] : 0});
  }
}

void CellOperator::apply(std::span<const double> u, std::span<double> out) const {
  const std::size_t S = coeff_.size();
  for (std::size_t i = 0; i < diag_.size(); ++i) {
    double acc = diag_[i] * u[i];
    const std::size_t* nb = &neighbours_[i * S];
    for (std::size_t s = 0; s < S; ++s) acc += coeff_[s] * u[nb[s]];
    out[i] = acc;
  }
}

double CellOperator::max_abs_diagonal() const {
  double m = 0.0;
  for (double d : diag_) m = std::max(m, std::abs(d));
  return m;
}

double CellOperator::min_off_diagonal() const {
  return coeff_.empty() ? 0.0 : *std::min_element(coeff_.begin(), coeff_.end());
}

EigenResult principal_eigen(const CellOperator& op, double tolerance, std::size_t max_iter) {
  if (!(tolerance > 0.0)) throw Error(ErrorKind::invalid_argument, "tolerance must be positive");
  if (op.min_off_diagonal() < 0.0)
    throw Error(ErrorKind::resolution_too_coarse,
                "twisted stencil has a negative off-diagonal entry (reduce h * mu)");
  const std::size_t n = op.size();
  const double shift = 1.0 + op.max_abs_diagonal();

  std::vector<double> phi(n, 1.0), psi(n);
  double residual = std::numeric_limits<double>::infinity();
  double lambda = 0.0;
  for (std::size_t it = 1; it <= max_iter; ++it) {
    op.apply(phi, psi);
    for (std::size_t i = 0; i < n; ++i) psi[i] += shift * phi[i];
    // Collatz-Wielandt bracket of the Perron root of O + sI.
    double lo = std::numeric_limits<double>::infinity(), hi = -lo, top = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!(psi[i] > 0.0))
        throw Error(ErrorKind::perron_violation, "power iterate lost positivity");
      const double q = psi[i] / phi[i];
      lo = std::min(lo, q);
      hi = std::max(hi, q);
      top = std::max(top, psi[i]);
    }
    const double rho = 0.5 * (lo + hi);
    residual = 0.0;
    for (std::size_t i = 0; i < n; ++i) residual = std::max(residual, std::abs(psi[i] - rho * phi[i]));
    lambda = rho - shift;
    if (residual <= tolerance * std::max(1.0, rho)) {
      EigenResult res{lambda,
                      PeriodicCoefficient(op.coefficient().dim(), op.coefficient().cell_points(),
                                          op.coefficient().spacing(), phi),
                      residual, it, shift};
      if (!(res.eigenfunction.min() > 0.0))
        throw Error(ErrorKind::perron_violation, "eigenfunction has a nonpositive entry");
      return res;
    }
    for (std::size_t i = 0; i < n; ++i) phi[i] = psi[i] / top;
  }
  std::ostringstream msg;
  msg << "power iteration stopped after " << max_iter << " iterations with residual " << residual
      << " (lambda ~ " << lambda << ")";
  throw Error(ErrorKind::no_convergence, msg.str());
}

double lambda_closed_form(const DispersalOp& op, double mu, const Direction& xi, double r) {
  switch (op.kind()) {
    case DispersalKind::random: return r + mu * mu;
    case DispersalKind::nonlocal: return op.kernel().exponential_moment(mu, xi) - 1.0 + r;
    case DispersalKind::discrete: {
      const LatticeWeights& w = op.lattice_weights();
      double s = 0.0;
      for (int d = 0; d < w.dim(); ++d)
        s += w.rate(d, +1) * (std::exp(-mu * xi[d]) - 1.0) + w.rate(d, -1) * (std::exp(mu * xi[d]) - 1.0);
      return s + r;
    }
  }
  return 0.0;
}

double lambda_discrete_symbol(const DispersalOp& op, double mu, const Direction& xi, double r) {
  if (op.kind() == DispersalKind::nonlocal)
    return op.kernel().discrete_exponential_moment(mu, xi) - 1.0 + r;
  return lambda_closed_form(op, mu, xi, r);
}

ExistenceReport check_pe_existence(const PeriodicCoefficient& a, const Kernel& kernel) {
  ExistenceReport rep;
  rep.gap = a.oscillation();
  rep.threshold = std::numeric_limits<double>::infinity();
  if (kernel.dim() == 1) {
    for (int sgn : {+1, -1}) rep.threshold = std::min(rep.threshold, kernel.half_mass(Direction::axis(1, 0, sgn)));
  } else {
    for (int k = 0; k < 64; ++k)
      rep.threshold = std::min(rep.threshold, kernel.half_mass(Direction::angle(2.0 * std::numbers::pi * k / 64)));
  }
  rep.condition2_ok = rep.gap < rep.threshold;
  return rep;
}

AverageBoundReport check_average_lower_bound(const DispersalOp& op, double mu, const Direction& xi,
                                             const PeriodicCoefficient& a) {
  AverageBoundReport rep;
  rep.lambda = principal_eigen(CellOperator(op, mu, xi, a)).lambda;
  // Compare against the constant-coefficient eigenvalue of the same discretization.
  const DispersalOp* used = &op;
  std::optional<DispersalOp> resampled;
  if (op.kind() == DispersalKind::nonlocal &&
      std::abs(op.kernel().spacing() - a.spacing()) > 1e-12 * a.spacing()) {
    resampled = DispersalOp::nonlocal(op.kernel().resampled(a.spacing()));
    used = &*resampled;
  }
  rep.lambda_averaged = lambda_discrete_symbol(*used, mu, xi, a.average());
  rep.passed = rep.lambda >= rep.lambda_averaged - 1e-8;
  return rep;
}

}  // namespace kpplab

#include "kpplab/habitat.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kpplab/error.hpp"

namespace kpplab {

Direction Direction::of(std::span<const double> components) {
  if (components.empty() || components.size() > static_cast<std::size_t>(kMaxDim))
    throw Error(ErrorKind::invalid_argument, "direction must have 1 or 2 components");
  double n2 = 0.0;
  for (double c : components) n2 += c * c;
  if (!(n2 > 0.0) || !std::isfinite(n2))
    throw Error(ErrorKind::invalid_argument, "direction must be a nonzero finite vector");
  Direction d;
  d.dim_ = static_cast<int>(components.size());
  d.v_ = {0.0, 0.0};
  const double n = std::sqrt(n2);
  for (std::size_t i = 0; i < components.size(); ++i) d.v_[i] = components[i] / n;
  return d;
}

Direction Direction::axis(int dim, int axis, int sign) {
  if (dim < 1 || dim > kMaxDim || axis < 0 || axis >= dim)
    throw Error(ErrorKind::invalid_argument, "axis direction out of range");
  Direction d;
  d.dim_ = dim;
  d.v_ = {0.0, 0.0};
  d.v_[axis] = sign >= 0 ? 1.0 : -1.0;
  return d;
}

Direction Direction::angle(double theta) {
  Direction d;
  d.dim_ = 2;
  d.v_ = {std::cos(theta), std::sin(theta)};
  return d;
}

Direction Direction::operator-() const {
  Direction d = *this;
  d.v_ = {-v_[0], -v_[1]};
  return d;
}

Habitat::Habitat(HabitatKind kind, int dim, double half_extent, double spacing,
                 Boundary boundary)
    : kind_(kind), dim_(dim), half_extent_(half_extent), spacing_(spacing), boundary_(boundary) {
  if (dim < 1 || dim > kMaxDim)
    throw Error(ErrorKind::invalid_argument, "habitat dimension must be 1 or 2");
  if (!(spacing > 0.0) || !std::isfinite(spacing))
    throw Error(ErrorKind::invalid_argument, "spacing must be positive");
  if (!(half_extent > 0.0) || !std::isfinite(half_extent))
    throw Error(ErrorKind::invalid_argument, "half extent must be positive");
  const double ratio = half_extent / spacing;
  const double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio))
    throw Error(ErrorKind::invalid_argument,
                "half extent " + std::to_string(half_extent) + " is not a multiple of spacing " +
                    std::to_string(spacing));
  n_ = 2 * static_cast<int>(rounded) + 1;
  if (n_ < 3) throw Error(ErrorKind::invalid_argument, "need at least 3 points per axis");
  size_ = 1;
  for (int d = 0; d < dim_; ++d) size_ *= static_cast<std::size_t>(n_);
}

Habitat Habitat::continuum(int dim, double half_extent, double spacing, Boundary boundary) {
  return Habitat(HabitatKind::continuum, dim, half_extent, spacing, boundary);
}

Habitat Habitat::lattice(int dim, int half_extent, Boundary boundary) {
  return Habitat(HabitatKind::lattice, dim, static_cast<double>(half_extent), 1.0, boundary);
}

int Habitat::axis_index(std::size_t index, int axis) const {
  if (dim_ == 1) return static_cast<int>(index);
  const auto n = static_cast<std::size_t>(n_);
  return axis == 0 ? static_cast<int>(index / n) : static_cast<int>(index % n);
}

Point Habitat::point(std::size_t index) const {
  Point p{0.0, 0.0};
  for (int d = 0; d < dim_; ++d) p[d] = coordinate(axis_index(index, d));
  return p;
}

double Habitat::norm(std::size_t index) const {
  const Point p = point(index);
  return std::hypot(p[0], p[1]);
}

double Habitat::volume() const { return std::pow(spacing_, dim_); }

double Habitat::max_projection(const Direction& xi) const {
  double s = 0.0;
  for (int d = 0; d < dim_; ++d) s += std::abs(xi[d]) * half_extent_;
  return s;
}

bool Habitat::operator==(const Habitat& o) const {
  return kind_ == o.kind_ && dim_ == o.dim_ && n_ == o.n_ && boundary_ == o.boundary_ &&
         half_extent_ == o.half_extent_ && spacing_ == o.spacing_;
}

Field::Field(const Habitat& h, std::vector<double> v) : habitat(h), values(std::move(v)) {
  if (values.size() != habitat.size())
    throw Error(ErrorKind::habitat_mismatch, "field size does not match habitat");
}

Field Field::from_function(const Habitat& h, const std::function<double(const Point&)>& fn) {
  Field f(h);
  for (std::size_t i = 0; i < h.size(); ++i) f.values[i] = fn(h.point(i));
  return f;
}

double Field::min() const { return *std::min_element(values.begin(), values.end()); }
double Field::max() const { return *std::max_element(values.begin(), values.end()); }

bool Field::all_finite() const {
  return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(ErrorKind::mismatched_sampling, "size mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace kpplab

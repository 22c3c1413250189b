#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace kpplab {

inline constexpr int kMaxDim = 2;
using Point = std::array<double, kMaxDim>;

enum class HabitatKind { continuum, lattice };
enum class Boundary { clamp, periodic };

// Unit vector in R^dim. Unused trailing components are zero.
class Direction {
 public:
  Direction() = default;
  // Normalizes; throws on a zero vector.
  static Direction of(std::span<const double> components);
  static Direction axis(int dim, int axis, int sign = +1);
  static Direction angle(double theta);  // 2-D

  int dim() const { return dim_; }
  double operator[](int i) const { return v_[i]; }
  const Point& components() const { return v_; }
  Direction operator-() const;
  double dot(const Point& x) const { return v_[0] * x[0] + v_[1] * x[1]; }

 private:
  int dim_ = 1;
  Point v_{1.0, 0.0};
};

// The truncated computational domain [-L, L]^dim, sampled at spacing h
// (h = 1 on a lattice). Grid points are stored row-major with axis 0
// varying slowest.
class Habitat {
 public:
  static Habitat continuum(int dim, double half_extent, double spacing,
                           Boundary boundary = Boundary::clamp);
  static Habitat lattice(int dim, int half_extent,
                         Boundary boundary = Boundary::clamp);

  HabitatKind kind() const { return kind_; }
  int dim() const { return dim_; }
  double half_extent() const { return half_extent_; }
  double spacing() const { return spacing_; }
  Boundary boundary() const { return boundary_; }

  // Points per axis, 2L/h + 1.
  int axis_points() const { return n_; }
  std::size_t size() const { return size_; }
  std::size_t stride(int axis) const { return axis == dim_ - 1 ? 1 : static_cast<std::size_t>(n_); }

  int axis_index(std::size_t index, int axis) const;
  double coordinate(int axis_idx) const { return -half_extent_ + axis_idx * spacing_; }
  Point point(std::size_t index) const;
  double norm(std::size_t index) const;
  // Cell volume h^dim used by quadrature.
  double volume() const;

  // Largest x.xi attained on the grid.
  double max_projection(const Direction& xi) const;

  bool operator==(const Habitat& other) const;

 private:
  Habitat(HabitatKind kind, int dim, double half_extent, double spacing, Boundary boundary);

  HabitatKind kind_;
  int dim_;
  double half_extent_;
  double spacing_;
  Boundary boundary_;
  int n_;
  std::size_t size_;
};

// Real values on every grid point of a habitat.
struct Field {
  Habitat habitat;
  std::vector<double> values;

  explicit Field(const Habitat& h, double fill = 0.0) : habitat(h), values(h.size(), fill) {}
  Field(const Habitat& h, std::vector<double> v);

  static Field from_function(const Habitat& h, const std::function<double(const Point&)>& fn);

  std::size_t size() const { return values.size(); }
  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
  std::span<const double> view() const { return values; }
  std::span<double> view() { return values; }

  double min() const;
  double max() const;
  bool all_finite() const;
  // Member of the positive cone with positive infimum.
  bool strictly_positive() const { return min() > 0.0; }
};

double max_abs_diff(std::span<const double> a, std::span<const double> b);

}  // namespace kpplab

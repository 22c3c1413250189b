#include <cmath>
#include <random>

#include "doctest.h"
#include "kpplab/dispersal.hpp"
#include "kpplab/error.hpp"

using namespace kpplab;

namespace {

struct Case {
  DispersalOp op;
  Habitat habitat;
};

std::vector<Case> cases() {
  return {
      {DispersalOp::random(), Habitat::continuum(1, 5.0, 0.1)},
      {DispersalOp::random(), Habitat::continuum(2, 3.0, 0.25)},
      {DispersalOp::nonlocal(Kernel(KernelProfile::tent, 1.0, 1, 0.1)), Habitat::continuum(1, 5.0, 0.1)},
      {DispersalOp::nonlocal(Kernel(KernelProfile::uniform, 1.0, 2, 0.25)), Habitat::continuum(2, 3.0, 0.25)},
      {DispersalOp::discrete(LatticeWeights::uniform(1)), Habitat::lattice(1, 30)},
      {DispersalOp::discrete(LatticeWeights({1.0, 0.5, 2.0, 0.3})), Habitat::lattice(2, 8)},
  };
}

Field random_field(const Habitat& h, std::mt19937_64& rng, double lo = 0.0, double hi = 1.0) {
  std::uniform_real_distribution<double> d(lo, hi);
  Field f(h);
  for (double& v : f.values) v = d(rng);
  return f;
}

}  // namespace

TEST_CASE("constants are dispersal-neutral") {
  for (const Case& c : cases()) {
    const Field out = apply(c.op, Field(c.habitat, 3.7));
    for (double v : out.values) CHECK(std::abs(v) <= 1e-13);
  }
}

TEST_CASE("random: Laplacian of x^2 is 2 in the interior") {
  const Habitat h = Habitat::continuum(1, 2.0, 0.05);
  const Field u = Field::from_function(h, [](const Point& x) { return x[0] * x[0]; });
  const Field out = apply(DispersalOp::random(), u);
  for (std::size_t i = 1; i + 1 < h.size(); ++i) CHECK(out[i] == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("discrete: indicator of the origin") {
  for (int dim : {1, 2}) {
    const Habitat h = Habitat::lattice(dim, 4);
    Field u(h);
    const std::size_t origin = h.size() / 2;
    u[origin] = 1.0;
    const Field out = apply(DispersalOp::discrete(LatticeWeights::uniform(dim)), u);
    CHECK(out[origin] == -2.0 * dim);
    int ones = 0;
    for (std::size_t i = 0; i < h.size(); ++i) {
      if (i == origin) continue;
      if (out[i] == 1.0) ++ones;
      else CHECK(out[i] == 0.0);
    }
    CHECK(ones == 2 * dim);
  }
}

TEST_CASE("habitat mismatch") {
  CHECK_THROWS_AS(apply(DispersalOp::discrete(LatticeWeights::uniform(1)), Field(Habitat::continuum(1, 5.0, 0.5))),
                  Error);
  CHECK_THROWS_AS(apply(DispersalOp::random(), Field(Habitat::lattice(1, 5))), Error);
  CHECK_THROWS_AS(apply(DispersalOp::discrete(LatticeWeights::uniform(2)), Field(Habitat::lattice(1, 5))), Error);
}

TEST_CASE("twist vanishes at mu = 0") {
  std::mt19937_64 rng(11);
  for (const Case& c : cases()) {
    const Field u = random_field(c.habitat, rng);
    const Direction xi = c.habitat.dim() == 1 ? Direction::axis(1, 0) : Direction::angle(0.7);
    CHECK(max_abs_diff(apply(c.op, u).view(), apply_twisted(c.op, 0.0, xi, u).view()) <= 1e-14);
  }
}

TEST_CASE("twisted operator on constants") {
  SUBCASE("random: mu^2 in the interior") {
    const Habitat h = Habitat::continuum(1, 3.0, 0.1);
    const Field out = apply_twisted(DispersalOp::random(), 0.5, Direction::axis(1, 0), Field(h, 1.0));
    for (std::size_t i = 1; i + 1 < h.size(); ++i) CHECK(out[i] == doctest::Approx(0.25).epsilon(1e-12));
  }
  SUBCASE("discrete: e^-1 + e - 2") {
    const Habitat h = Habitat::lattice(1, 10);
    const Field out = apply_twisted(DispersalOp::discrete(LatticeWeights::uniform(1)), 1.0, Direction::axis(1, 0),
                                    Field(h, 1.0));
    for (std::size_t i = 1; i + 1 < h.size(); ++i)
      CHECK(out[i] == doctest::Approx(std::exp(-1.0) + std::exp(1.0) - 2.0).epsilon(1e-14));
  }
  SUBCASE("nonlocal: discrete moment minus one") {
    const Kernel k(KernelProfile::uniform, 1.0, 1, 0.01);
    const Habitat h = Habitat::continuum(1, 3.0, 0.01);
    const Field out = apply_twisted(DispersalOp::nonlocal(k), 1.0, Direction::axis(1, 0), Field(h, 1.0));
    const double symbol = k.discrete_exponential_moment(1.0, Direction::axis(1, 0)) - 1.0;
    CHECK(out[h.size() / 2] == doctest::Approx(symbol).epsilon(1e-12));
    CHECK(out[h.size() / 2] + 1.0 == doctest::Approx(std::sinh(1.0)).epsilon(5e-3));
  }
}

TEST_CASE("linearity") {
  std::mt19937_64 rng(5);
  for (const Case& c : cases()) {
    const Field u = random_field(c.habitat, rng, -1.0, 1.0), v = random_field(c.habitat, rng, -1.0, 1.0);
    const double a = 0.7, b = -1.3;
    Field w(c.habitat);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = a * u[i] + b * v[i];
    const Field Au = apply(c.op, u), Av = apply(c.op, v), Aw = apply(c.op, w);
    double err = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) err = std::max(err, std::abs(Aw[i] - a * Au[i] - b * Av[i]));
    const double scale = c.op.kind() == DispersalKind::random ? 1.0 / (c.habitat.spacing() * c.habitat.spacing()) : 1.0;
    CHECK(err <= 1e-12 * scale);
  }
}

TEST_CASE("cooperative: nonnegative at zeros of nonnegative fields") {
  std::mt19937_64 rng(9);
  for (const Case& c : cases()) {
    Field u = random_field(c.habitat, rng);
    for (std::size_t i = 0; i < u.size(); i += 7) u[i] = 0.0;
    const Field out = apply(c.op, u);
    for (std::size_t i = 0; i < u.size(); i += 7) CHECK(out[i] >= 0.0);
  }
}

TEST_CASE("periodic boundary wraps") {
  const Habitat h = Habitat::continuum(1, 1.0, 0.1, Boundary::periodic);
  const double p = h.axis_points() * h.spacing();
  const Field u = Field::from_function(h, [&](const Point& x) { return std::sin(2.0 * M_PI * x[0] / p); });
  const Field out = apply(DispersalOp::random(), u);
  const double k = 2.0 * M_PI / p;
  const double symbol = (2.0 * std::cos(k * 0.1) - 2.0) / 0.01;
  for (std::size_t i = 0; i < h.size(); ++i) CHECK(out[i] == doctest::Approx(symbol * u[i]).scale(1.0).epsilon(1e-9));
}

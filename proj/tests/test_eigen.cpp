#include <cmath>
#include <random>

#include "doctest.h"
#include "kpplab/eigen.hpp"
#include "kpplab/error.hpp"

using namespace kpplab;

namespace {

std::vector<double> apply_cell(const CellOperator& op, const std::vector<double>& u) {
  std::vector<double> out(u.size());
  op.apply(u, out);
  return out;
}

PeriodicCoefficient random_coefficient(int dim, int m, double h, std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> d(0.0, 1.0);
  const double a = d(rng), b = d(rng), p1 = 6.28 * d(rng), p2 = 6.28 * d(rng);
  const double period = m * h;
  return PeriodicCoefficient::from_function(dim, m, h, [&](const Point& x) {
    const double s = 0.5 + 0.3 * a * std::sin(2 * M_PI * x[0] / period + p1) +
                     0.2 * b * std::cos(4 * M_PI * (x[0] + x[1]) / period + p2);
    return lo + (hi - lo) * s;
  });
}

}  // namespace

TEST_CASE("cell operator on constants") {
  const Direction e = Direction::axis(1, 0);
  const auto zero = PeriodicCoefficient::constant(1, 40, 0.1, 0.0);
  const std::vector<double> ones(40, 1.0);
  SUBCASE("a = 0, mu = 0 maps 1 to 0") {
    for (const DispersalOp& op : {DispersalOp::random(), DispersalOp::nonlocal(Kernel(KernelProfile::tent, 1.0, 1, 0.1))})
      for (double v : apply_cell(CellOperator(op, 0.0, e, zero), ones)) CHECK(std::abs(v) <= 1e-12);
    const auto lat = PeriodicCoefficient::constant(1, 6, 1.0, 0.0);
    for (double v : apply_cell(CellOperator(DispersalOp::discrete(LatticeWeights::uniform(1)), 0.0, e, lat),
                               std::vector<double>(6, 1.0)))
      CHECK(v == 0.0);
  }
  SUBCASE("random, a = c") {
    const auto c = PeriodicCoefficient::constant(1, 40, 0.1, 0.37);
    for (double v : apply_cell(CellOperator(DispersalOp::random(), 0.0, e, c), ones))
      CHECK(v == doctest::Approx(0.37).epsilon(1e-12));
  }
  SUBCASE("discrete, mu = 1") {
    const auto lat = PeriodicCoefficient::constant(1, 6, 1.0, 0.0);
    for (double v : apply_cell(CellOperator(DispersalOp::discrete(LatticeWeights::uniform(1)), 1.0, e, lat),
                               std::vector<double>(6, 1.0)))
      CHECK(v == doctest::Approx(std::exp(-1.0) + std::exp(1.0) - 2.0).epsilon(1e-14));
  }
}

TEST_CASE("cell operator errors") {
  const Direction e = Direction::axis(1, 0);
  CHECK_THROWS_AS(CellOperator(DispersalOp::random(), 0.0, e, PeriodicCoefficient::constant(1, 6, 0.1, 1.0)), Error);
  CHECK_THROWS_AS(CellOperator(DispersalOp::nonlocal(Kernel(KernelProfile::tent, 1.0, 1, 0.1)), 0.0, e,
                               PeriodicCoefficient::constant(1, 20, 0.1, 1.0)),
                  Error);  // period 2 = 2 delta0
}

TEST_CASE("closed forms") {
  const Direction e = Direction::axis(1, 0);
  CHECK(lambda_closed_form(DispersalOp::random(), 0.5, e, 1.0) == doctest::Approx(1.25).epsilon(1e-15));
  CHECK(lambda_closed_form(DispersalOp::discrete(LatticeWeights::uniform(1)), 0.0, e, 0.7) == 0.7);
  const DispersalOp uni = DispersalOp::nonlocal(Kernel(KernelProfile::uniform, 1.0, 1, 0.1));
  CHECK(lambda_closed_form(uni, 1.0, e, 0.0) == doctest::Approx(std::sinh(1.0) - 1.0).epsilon(1e-12));
  CHECK(lambda_closed_form(uni, 1.0, e, 0.0) == doctest::Approx(0.175201).epsilon(1e-6));
}

TEST_CASE("principal eigenvalue, constant coefficient") {
  SUBCASE("random: r + mu^2") {
    for (double mu : {0.0, 0.5, 1.0, 2.0}) {
      const auto a = PeriodicCoefficient::constant(1, 64, 0.05, 1.0);
      const EigenResult r = principal_eigen(CellOperator(DispersalOp::random(), mu, Direction::axis(1, 0), a));
      CHECK(r.lambda == doctest::Approx(1.0 + mu * mu).epsilon(1e-9));
      CHECK(r.eigenfunction.min() > 0.0);
      CHECK(r.eigenfunction.max() == doctest::Approx(1.0));
      CHECK(r.residual <= kEigenTolerance * std::max(1.0, r.lambda + r.shift));
    }
  }
  SUBCASE("discrete: sum a_k (e^{-mu k xi} - 1) + r") {
    for (int dim : {1, 2}) {
      const LatticeWeights w = dim == 1 ? LatticeWeights({1.0, 1.0}) : LatticeWeights({1.0, 0.5, 2.0, 0.3});
      const Direction xi = dim == 1 ? Direction::axis(1, 0) : Direction::angle(0.4);
      for (double mu : {0.0, 0.3, 1.0, 1.7}) {
        const auto a = PeriodicCoefficient::constant(dim, 6, 1.0, 0.8);
        const EigenResult r = principal_eigen(CellOperator(DispersalOp::discrete(w), mu, xi, a));
        double expect = 0.8;
        for (int d = 0; d < dim; ++d)
          expect += w.rate(d, +1) * (std::exp(-mu * xi[d]) - 1.0) + w.rate(d, -1) * (std::exp(mu * xi[d]) - 1.0);
        CHECK(std::abs(r.lambda - expect) <= 1e-10);
        CHECK(r.eigenfunction.min() > 0.0);
      }
    }
  }
  SUBCASE("nonlocal uniform kernel: sinh(mu)/mu - 1 + r within quadrature error") {
    for (double mu : {0.5, 1.0, 2.0}) {
      const double h = 0.02;
      const DispersalOp op = DispersalOp::nonlocal(Kernel(KernelProfile::uniform, 1.0, 1, h));
      const EigenResult r =
          principal_eigen(CellOperator(op, mu, Direction::axis(1, 0), PeriodicCoefficient::constant(1, 200, h, 0.5)));
      CHECK(r.lambda == doctest::Approx(lambda_discrete_symbol(op, mu, Direction::axis(1, 0), 0.5)).epsilon(1e-10));
      CHECK(std::abs(r.lambda - (std::sinh(mu) / mu - 0.5)) <= 0.05 * std::sinh(mu) / mu);
    }
  }
}

TEST_CASE("nonlocal tent kernel converges at second order") {
  const double mu = 1.0, r = 0.5;
  const Direction e = Direction::axis(1, 0);
  const double exact = lambda_closed_form(DispersalOp::nonlocal(Kernel(KernelProfile::tent, 1.0, 1, 0.1)), mu, e, r);
  std::vector<double> errs;
  for (int n : {8, 16, 32, 64}) {
    const double h = 1.0 / n;
    const DispersalOp op = DispersalOp::nonlocal(Kernel(KernelProfile::tent, 1.0, 1, h));
    const EigenResult res = principal_eigen(CellOperator(op, mu, e, PeriodicCoefficient::constant(1, 4 * n, h, r)));
    errs.push_back(std::abs(res.lambda - exact));
  }
  for (std::size_t k = 1; k < errs.size(); ++k) {
    const double order = std::log2(errs[k - 1] / errs[k]);
    CHECK(order >= 1.8);
    CHECK(order <= 2.2);
  }
}

TEST_CASE("mu = 0 eigenvalue is independent of direction") {
  std::mt19937_64 rng(4);
  const auto a = random_coefficient(2, 16, 0.25, rng, 0.2, 1.0);
  const auto al = random_coefficient(2, 6, 1.0, rng, 0.2, 1.0);
  const std::vector<std::pair<DispersalOp, const PeriodicCoefficient*>> cases{
      {DispersalOp::random(), &a},
      {DispersalOp::nonlocal(Kernel(KernelProfile::tent, 1.0, 2, 0.25)), &a},
      {DispersalOp::discrete(LatticeWeights({1.0, 0.5, 2.0, 0.3})), &al}};
  for (const auto& [op, coef] : cases) {
    const double ref = principal_eigen(CellOperator(op, 0.0, Direction::axis(2, 0), *coef)).lambda;
    for (int k = 0; k < 8; ++k) {
      const double l = principal_eigen(CellOperator(op, 0.0, Direction::angle(2 * M_PI * k / 8), *coef)).lambda;
      CHECK(std::abs(l - ref) <= 1e-9);
    }
  }
}

TEST_CASE("monotone in the coefficient") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> d(0.0, 0.3);
  const Direction e = Direction::axis(1, 0);
  const std::vector<std::pair<DispersalOp, std::pair<int, double>>> cases{
      {DispersalOp::random(), {40, 0.1}},
      {DispersalOp::nonlocal(Kernel(KernelProfile::tent, 1.0, 1, 0.1)), {40, 0.1}},
      {DispersalOp::discrete(LatticeWeights::uniform(1)), {7, 1.0}}};
  for (const auto& [op, cell] : cases) {
    for (int k = 0; k < 5; ++k) {
      const auto a = random_coefficient(1, cell.first, cell.second, rng, -0.5, 1.0);
      std::vector<double> b = a.samples();
      for (double& v : b) v += d(rng);
      const PeriodicCoefficient bc(1, {cell.first, 1}, cell.second, b);
      const double la = principal_eigen(CellOperator(op, 0.6, e, a)).lambda;
      const double lb = principal_eigen(CellOperator(op, 0.6, e, bc)).lambda;
      CHECK(la <= lb + 1e-9);
    }
  }
}

TEST_CASE("average lower bound") {
  const Direction e = Direction::axis(1, 0);
  SUBCASE("constant coefficient is equality") {
    const auto a = PeriodicCoefficient::constant(1, 40, 0.1, 0.6);
    const AverageBoundReport r = check_average_lower_bound(DispersalOp::random(), 0.5, e, a);
    CHECK(r.passed);
    CHECK(r.lambda == doctest::Approx(r.lambda_averaged).epsilon(1e-9));
  }
  SUBCASE("random, 1 + 0.3 sin, mu = 0") {
    const double p = 4.0;
    const auto a = PeriodicCoefficient::from_function(
        1, 40, 0.1, [&](const Point& x) { return 1.0 + 0.3 * std::sin(2 * M_PI * x[0] / p); });
    const AverageBoundReport r = check_average_lower_bound(DispersalOp::random(), 0.0, e, a);
    CHECK(r.passed);
    CHECK(r.lambda >= 1.0 - 1e-8);
  }
  SUBCASE("discrete, alternating 0.5 / 1.5, mu = 0.4") {
    const PeriodicCoefficient a(1, {2, 1}, 1.0, {0.5, 1.5});
    const AverageBoundReport r = check_average_lower_bound(DispersalOp::discrete(LatticeWeights::uniform(1)), 0.4, e, a);
    CHECK(r.passed);
    CHECK(r.lambda_averaged ==
          doctest::Approx(lambda_closed_form(DispersalOp::discrete(LatticeWeights::uniform(1)), 0.4, e, 1.0)));
  }
}

TEST_CASE("nonlocal existence condition") {
  const Kernel k(KernelProfile::tent, 1.0, 1, 0.1);
  const ExistenceReport c = check_pe_existence(PeriodicCoefficient::constant(1, 40, 0.1, 1.0), k);
  CHECK(c.condition2_ok);
  CHECK(c.gap == 0.0);
  CHECK(c.threshold == doctest::Approx(0.5).epsilon(1e-12));
  const auto osc = PeriodicCoefficient::from_function(1, 40, 0.1, [](const Point& x) { return 0.4 * std::sin(x[0] * M_PI / 2); });
  const ExistenceReport r = check_pe_existence(osc, k);
  CHECK(r.gap == doctest::Approx(0.8));
  CHECK_FALSE(r.condition2_ok);
  const Kernel k2(KernelProfile::smooth, 1.0, 2, 0.125);
  CHECK(check_pe_existence(PeriodicCoefficient::constant(2, 24, 0.125, 0.0), k2).threshold ==
        doctest::Approx(0.5).epsilon(1e-12));
}

#include "kpplab/kernel.hpp"

#include <cmath>
#include <numbers>

#include "kpplab/error.hpp"

namespace kpplab {

double gauss_legendre(const std::function<double(double)>& f, double a, double b, int panels) {
  static constexpr std::array<double, 5> nodes{
      0.0, -0.5384693101056831, 0.5384693101056831, -0.9061798459386640, 0.9061798459386640};
  static constexpr std::array<double, 5> wts{0.5688888888888889, 0.4786286704993665,
                                             0.4786286704993665, 0.2369268850561891,
                                             0.2369268850561891};
  const double w = (b - a) / panels;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * w;
    double s = 0.0;
    for (int k = 0; k < 5; ++k) s += wts[k] * f(mid + 0.5 * w * nodes[k]);
    total += 0.5 * w * s;
  }
  return total;
}

double compensated_sum(std::span<const double> values) {
  double sum = 0.0, c = 0.0;
  for (double v : values) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v))
      c += (sum - t) + v;
    else
      c += (v - t) + sum;
    sum = t;
  }
  return sum + c;
}

namespace {
constexpr int kPanels = 2000;
}

Kernel::Kernel(KernelProfile profile, double delta0, int dim, double spacing)
    : profile_(profile), delta0_(delta0), dim_(dim), spacing_(spacing) {
  if (!(delta0 > 0.0) || !std::isfinite(delta0))
    throw Error(ErrorKind::invalid_argument, "kernel support radius must be positive");
  if (!(spacing > 0.0)) throw Error(ErrorKind::invalid_argument, "kernel spacing must be positive");
  if (dim < 1 || dim > kMaxDim) throw Error(ErrorKind::invalid_argument, "kernel dim must be 1 or 2");

  // Normalization of the continuous profile.
  if (dim_ == 1)
    norm_const_ = 2.0 * delta0_ * gauss_legendre([&](double s) { return shape(s); }, 0.0, 1.0, kPanels);
  else
    norm_const_ = 2.0 * std::numbers::pi * delta0_ * delta0_ *
                  gauss_legendre([&](double s) { return shape(s) * s; }, 0.0, 1.0, kPanels);

  reach_ = static_cast<int>(std::ceil(delta0_ / spacing_));
  std::vector<double> raw;
  const int lo1 = dim_ >= 2 ? -reach_ : 0, hi1 = dim_ >= 2 ? reach_ : 0;
  for (int i = -reach_; i <= reach_; ++i) {
    for (int j = lo1; j <= hi1; ++j) {
      const double r = spacing_ * std::hypot(double(i), double(j));
      const double g = r < delta0_ ? shape(r / delta0_) : 0.0;
      if (g > 0.0) {
        offsets_.push_back(Offset{i, j});
        raw.push_back(g);
      }
    }
  }
  if (raw.empty())
    throw Error(ErrorKind::resolution_too_coarse, "kernel has no grid points inside its support");
  const double total = compensated_sum(raw);
  weights_.resize(raw.size());
  for (std::size_t k = 0; k < raw.size(); ++k) weights_[k] = raw[k] / total;
}

double Kernel::shape(double s) const {
  if (s >= 1.0) return 0.0;
  switch (profile_) {
    case KernelProfile::uniform: return 1.0;
    case KernelProfile::tent: return 1.0 - s;
    case KernelProfile::smooth: return std::exp(1.0 - 1.0 / (1.0 - s * s));
  }
  return 0.0;
}

double Kernel::density(double norm) const { return shape(norm / delta0_) / norm_const_; }

double Kernel::exponential_moment(double mu, const Direction& xi) const {
  if (dim_ == 1) {
    const double sgn = xi[0];
    auto f = [&](double z) { return std::exp(-mu * sgn * z) * density(std::abs(z)); };
    return gauss_legendre(f, -delta0_, 0.0, kPanels) + gauss_legendre(f, 0.0, delta0_, kPanels);
  }
  // Radial kernel: the angular integral is 2 pi I0(mu rho) for any unit xi.
  auto f = [&](double rho) {
    return density(rho) * rho * std::cyl_bessel_i(0.0, mu * rho);
  };
  return 2.0 * std::numbers::pi * gauss_legendre(f, 0.0, delta0_, kPanels);
}

double Kernel::discrete_exponential_moment(double mu, const Direction& xi) const {
  std::vector<double> terms(weights_.size());
  for (std::size_t k = 0; k < weights_.size(); ++k) {
    const double proj = spacing_ * (offsets_[k][0] * xi[0] + (dim_ >= 2 ? offsets_[k][1] * xi[1] : 0.0));
    terms[k] = weights_[k] * std::exp(-mu * proj);
  }
  return compensated_sum(terms);
}

double Kernel::half_mass(const Direction& xi) const {
  std::vector<double> terms;
  for (std::size_t k = 0; k < weights_.size(); ++k) {
    const double proj = offsets_[k][0] * xi[0] + (dim_ >= 2 ? offsets_[k][1] * xi[1] : 0.0);
    if (std::abs(proj) < 1e-12)
      terms.push_back(0.5 * weights_[k]);
    else if (proj < 0.0)
      terms.push_back(weights_[k]);
  }
  return compensated_sum(terms);
}

}  // namespace kpplab

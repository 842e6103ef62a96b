#include "orlicz/kernels.hpp"

#include <cmath>
#include <random>
#include <string>

#include "orlicz/errors.hpp"

namespace orlicz {

namespace {

double norm2(const std::vector<double>& z) {
  double s = 0.0;
  for (double v : z) s += v * v;
  return std::sqrt(s);
}

}  // namespace

double KernelSpec::omega() const {
  // Surface measure of the unit sphere S^{d-1}: 2 pi^{d/2} / Gamma(d/2).
  return 2.0 * std::pow(M_PI, 0.5 * dim) / std::tgamma(0.5 * dim);
}

void KernelSpec::validate() const {
  if (dim < 3) throw PreconditionError("kernel requires dim >= 3");
  if (i < 1 || i > dim || j < 1 || j > dim) {
    throw PreconditionError("kernel indices must lie in [1, dim]");
  }
}

double kernel_grad(const KernelSpec& spec, const std::vector<double>& z) {
  spec.validate();
  if (z.size() != static_cast<std::size_t>(spec.dim)) {
    throw PreconditionError("kernel point has wrong dimension");
  }
  const double r = norm2(z);
  if (r == 0.0) throw SingularityError("kernel_grad at z = 0");
  return -z[spec.i - 1] * std::pow(r, -spec.dim) / spec.omega();
}

double kernel_hess(const KernelSpec& spec, const std::vector<double>& z) {
  spec.validate();
  if (z.size() != static_cast<std::size_t>(spec.dim)) {
    throw PreconditionError("kernel point has wrong dimension");
  }
  const double r = norm2(z);
  if (r == 0.0) throw SingularityError("kernel_hess at z = 0");
  const double delta = (spec.i == spec.j) ? 1.0 : 0.0;
  const double zi = z[spec.i - 1];
  const double zj = z[spec.j - 1];
  return -(delta * std::pow(r, -spec.dim) -
           spec.dim * zi * zj * std::pow(r, -(spec.dim + 2))) /
         spec.omega();
}

SmoothnessScan kernel_smoothness_constant(const KernelSpec& spec, int samples,
                                          std::uint64_t seed) {
  spec.validate();
  if (samples < 1) throw PreconditionError("need at least one sample");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> umag(0.1, 10.0);
  std::uniform_real_distribution<double> ustep(1e-4, 0.5);

  SmoothnessScan scan;
  scan.samples = samples;
  std::vector<double> z(spec.dim), zh(spec.dim), dir(spec.dim);
  for (int s = 0; s < samples; ++s) {
    double nz = 0.0;
    for (int a = 0; a < spec.dim; ++a) {
      z[a] = gauss(rng);
      nz += z[a] * z[a];
    }
    nz = std::sqrt(nz);
    const double rz = umag(rng);
    for (auto& v : z) v *= rz / nz;

    double nd = 0.0;
    for (int a = 0; a < spec.dim; ++a) {
      dir[a] = gauss(rng);
      nd += dir[a] * dir[a];
    }
    nd = std::sqrt(nd);
    const double rh = ustep(rng) * rz;  // 2|h| <= |z| enforced by range
    for (int a = 0; a < spec.dim; ++a) {
      zh[a] = z[a] + dir[a] * rh / nd;
    }
    const double diff = std::fabs(kernel_hess(spec, zh) - kernel_hess(spec, z));
    const double ratio = diff * std::pow(rz, spec.dim + 1) / rh;
    if (ratio > scan.constant) scan.constant = ratio;
  }
  return scan;
}

}  // namespace orlicz

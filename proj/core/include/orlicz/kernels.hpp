#pragma once

#include <cstdint>
#include <vector>

namespace orlicz {

enum class KernelOrder { first_derivative, second_derivative };

/// Derivatives of the Newtonian kernel k0(z) = c_d |z|^{2-d} normalized so
/// that -Laplace(k0) is the Dirac delta; omega_d is the surface measure of
/// the unit sphere (4 pi in dimension 3).  Indices are 1-based.
struct KernelSpec {
  int dim = 3;  // d >= 3
  KernelOrder order = KernelOrder::second_derivative;
  int i = 1;
  int j = 1;

  double omega() const;
  /// Checks dim >= 3 and 1 <= i, j <= dim; throws PreconditionError.
  void validate() const;
};

/// d_i k0(z) = -omega_d^-1 z_i |z|^-d.  Throws SingularityError at z = 0.
double kernel_grad(const KernelSpec& spec, const std::vector<double>& z);

/// d_ij k0(z) = -omega_d^-1 (delta_ij |z|^-d - d z_i z_j |z|^-(d+2)).
/// Homogeneous of degree -d; trace-free off the origin.  Throws
/// SingularityError at z = 0.
double kernel_hess(const KernelSpec& spec, const std::vector<double>& z);

struct SmoothnessScan {
  double constant = 0.0;  // max |K(z+h) - K(z)| |z|^{d+1} / |h| over samples
  int samples = 0;
};

/// Measures the Calderon-Zygmund smoothness constant of kernel_hess by
/// sampling random pairs (z, h) with 2|h| <= |z|, deterministic in the
/// seed.
SmoothnessScan kernel_smoothness_constant(const KernelSpec& spec, int samples,
                                          std::uint64_t seed);

}  // namespace orlicz

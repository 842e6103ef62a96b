#pragma once

#include <Eigen/Dense>

#include "orlicz/field.hpp"

namespace orlicz {

struct PotentialOptions {
  double rel_tol = 1e-12;  // Krylov relative residual target
  int max_iter = 50000;
};

struct SolveInfo {
  int iterations = 0;
  double residual = 0.0;  // relative residual actually reached
  double m = 0.0, M = 0.0;  // ellipticity bounds of the symmetric part
};

/// Potential P[h]: discrete zero-Dirichlet solution of -div(A0 grad w) = h
/// on the grid mask (ghost values 0), with the symmetrized constant
/// coefficient stencil (centered second differences, mixed differences for
/// the off-diagonal part).  A0 is replaced by its symmetric part.  Throws
/// EllipticityError when that part is not positive definite and
/// SolverError on non-convergence.
SampledField potential(const SampledField& h, const Eigen::Matrix3d& A0,
                       SolveInfo* info = nullptr,
                       const PotentialOptions& opt = {});

/// Quasi-potential Q[G]: zero-Dirichlet solution of
/// -div(A0 grad w) = div(G) with div computed by centered differences and
/// G extended by zero outside the mask.
SampledField quasi_potential(const SampledField& G, const Eigen::Matrix3d& A0,
                             SolveInfo* info = nullptr,
                             const PotentialOptions& opt = {});

/// Riesz potential (I_alpha f)(x) = sum_y f(y) |x-y|^{alpha-d} vol(cell),
/// alpha in (0, d), by direct summation over the support; the singular
/// self-cell uses the exact integral over the inscribed ball plus a
/// midpoint remainder for the corner shell.  Requires equal spacing on
/// the active axes.
SampledField riesz_potential(const SampledField& f, double alpha);

enum class Parity { odd, even };

/// Extends a field supported on the upper half (cell centers with
/// x_dim > 0) to the reflected lower half with the requested parity,
/// enlarging the mask by the mirror image.  The reflection hyperplane
/// x_dim = 0 must lie on a cell interface (even extent, symmetric
/// origin); otherwise AlignmentError.  Cells already inside the mask on
/// the lower half trigger PreconditionError.
SampledField reflect_extend(const SampledField& f, Parity parity);

/// Euclidean magnitude of the d axis-aligned second differences
/// (u(+e_a) - 2u + u(-e_a)) / h_a^2 with zero ghost values, as a scalar
/// field; the discrete surrogate for |D^2 u|.
SampledField second_differences(const SampledField& u);

}  // namespace orlicz

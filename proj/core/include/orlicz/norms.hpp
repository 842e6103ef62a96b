#pragma once

#include "orlicz/field.hpp"
#include "orlicz/rearrange.hpp"
#include "orlicz/young.hpp"

namespace orlicz {

struct LuxemburgOptions {
  double rel_tol = 1e-13;  // bisection width target, relative
  int max_iter = 256;
};

/// Orlicz modular: sum over inside cells of psi(|f| / lambda) x cell
/// volume.  Returns +infinity when any term overflows.  Outside the
/// tabulated hull of psi the integrand is extended log-linearly with the
/// edge slope (exact for the closed-form catalog, principled for
/// table-backed conjugates).
double orlicz_modular(const SampledField& f, const YoungFunction& psi,
                      double lambda);
double orlicz_modular(const RearrangedProfile& f, const YoungFunction& psi,
                      double lambda);

/// Luxemburg norm inf { lambda > 0 : modular(f, lambda) <= 1 } by
/// bisection on lambda / max|f|, which makes the result exactly
/// homogeneous.  Zero fields give 0.  Vector fields are measured through
/// their pointwise Euclidean magnitude.  Throws OverflowGuardError (with
/// the offending cell) when no bracket with modular <= 1 can be
/// established.
double luxemburg_norm(const SampledField& f, const YoungFunction& psi,
                      const LuxemburgOptions& opt = {});
double luxemburg_norm(const RearrangedProfile& f, const YoungFunction& psi,
                      const LuxemburgOptions& opt = {});

/// Plain L^p norm by midpoint quadrature over inside cells.
double lp_norm(const SampledField& f, double p);

/// ||f||_psi + sum_i ||d_i f||_psi with the difference stencils of
/// derivative().  Scalar fields only.
double sobolev_norm(const SampledField& f, const YoungFunction& psi,
                    DerivativeStats* stats = nullptr,
                    const LuxemburgOptions& opt = {});

struct ScaledBallNorm {
  double gradient_term = 0.0;  // || |grad f| ||_psi over the masked ball
  double lower_term = 0.0;     // (2r)^-1 ||f||_psi
  double value() const { return gradient_term + lower_term; }
};

/// Scale-balanced ball norm on a grid masked to the ball of radius 2r.
ScaledBallNorm scaled_ball_norm(const SampledField& f, const YoungFunction& psi,
                                double r, const LuxemburgOptions& opt = {});

/// Lorentz norm || t^{1/p - 1/q} f*(t) ||_{L^q(0, measure)}, evaluated in
/// closed form on the rearranged step profile; q may be infinity.
/// Requires p > 1 and q >= 1.
double lorentz_norm(const SampledField& f, double p, double q);
double lorentz_norm(const RearrangedProfile& f, double p, double q);

}  // namespace orlicz

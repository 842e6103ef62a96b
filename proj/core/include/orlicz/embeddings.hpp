#pragma once

#include <optional>
#include <string>
#include <vector>

#include "orlicz/asymptotic_fit.hpp"
#include "orlicz/tabulated.hpp"
#include "orlicz/young.hpp"

namespace orlicz {

/// Value and convergence verdict of an improper integral whose endpoint
/// behavior is classified by a fitted local power law.
struct IntegralResult {
  double value = 0;            // finite part (meaningless when divergent)
  bool converges = false;
  double fitted_exponent = 0;  // integrand exponent at the improper endpoint
};

/// I0(psi, d, s) = \int_0^s (t/psi(t))^{1/(d-1)} dt.  The small-t endpoint is
/// integrated analytically from a fitted edge power law; verdict "diverges"
/// when the fitted exponent is <= -1 (within the standard margin).
IntegralResult integral_I0(const YoungFunction& psi, int d, double s);

/// Iinf(psi, d) = \int_1^infinity (t/psi(t))^{1/(d-1)} dt with the analogous
/// tail classification: converges iff the fitted tail exponent < -1.
IntegralResult integral_Iinf(const YoungFunction& psi, int d);

struct SobolevOptions {
  double t_lo = 1e-10;     // lower edge of the integral tabulation
  double target_hi = 1e12; // extend the range until psi_d covers [.., this]
  int per_decade = 200;
  /// When the defining integral diverges at 0 (the q = d borderline),
  /// replace psi below t = 1 by the benign power psi(1) t^{(d+1)/2} inside
  /// the integral only.  Every claim about psi_d is asymptotic, so the
  /// modification changes none of them; the flag records that it happened.
  bool head_regularize = false;
  /// Hard ceiling for the integration variable (intersected with psi's
  /// hull).  Borderline inputs, where H grows only logarithmically, need
  /// this close to the double-precision limit to open a usable window.
  double s_cap = 1e68;
};

/// The Sobolev conjugate psi_d(t) = psi(H^{-1}(t)) with
/// H(s) = [ \int_0^s (t/psi)^{1/(d-1)} dt ]^{(d-1)/d}.
struct SobolevConjugate {
  YoungFunction psi_d;
  LogLogTable H;             // x = log s -> log H(s), exact slopes
  bool head_regularized = false;
  /// True when H is bounded (the integral converges at infinity): the
  /// target leaves the Orlicz scale and psi_d is only defined below h_sup.
  bool saturated = false;
  double h_sup = 0;          // largest tabulated H value
};
SobolevConjugate sobolev_conjugate(const YoungFunction& psi, int d,
                                   const SobolevOptions& opt = {});

struct ModulusOptions {
  double theta_lo = 0.05;    // lower edge of the Theta tabulation (in t)
  double theta_hi = 1e40;    // hard upper edge
  int per_decade = 200;
  /// The psi* tabulation is extended until Theta covers r^{-d} for all
  /// r >= r_min_target, so varpi is served by real data (not tail
  /// extrapolation) down to this radius.
  double r_min_target = 1e-9;
};

/// Theta(t) = t^{d'} \int_t^infty psi*(s) s^{-1-d'} ds with d' = d/(d-1),
/// and the continuity modulus varpi(r) = r^{1-d} / Theta^{-1}(r^{-d}).
struct ContinuityModulus {
  LogLogTable theta;   // x = log t -> log Theta(t), increasing
  LogLogTable varpi;   // x = log r -> log varpi(r), increasing
  double tail_exponent = 0;  // of the Theta integrand
  std::optional<YoungFunction> star;  // the psi* used to build Theta
};
ContinuityModulus continuity_modulus(const YoungFunction& psi, int d,
                                     const ModulusOptions& opt = {});

/// gamma = [ (psi*)_d ]*, the space whose norm controls the datum g in the
/// a priori estimate, together with the split factor gamma_1 defined by
/// gamma^{-1}(t) = t^{1/d} gamma_1^{-1}(t).
struct AssociatedSpace {
  YoungFunction gamma;
  YoungFunction gamma_1;
  SobolevConjugate star_d;   // the intermediate (psi*)_d construction
};
AssociatedSpace associated_space(const YoungFunction& psi, int d);

/// Everything the embedding theory attaches to one (psi, d) pair, with
/// convergence verdicts deciding which pieces exist.
struct EmbeddingBundle {
  YoungFunction psi;
  int dim = 3;
  bool i0_converges = false;
  bool iinf_converges = false;
  std::optional<SobolevConjugate> sobolev;   // when i0_converges
  std::optional<ContinuityModulus> modulus;  // when iinf_converges
  std::optional<AssociatedSpace> associated;
};
EmbeddingBundle embedding_bundle(const YoungFunction& psi, int d,
                                 const SobolevOptions& sopt = {},
                                 const ModulusOptions& mopt = {});

/// Convenience: scale-adapted asymptotic fit of a YoungFunction over
/// [t_lo, t_hi] (see fit_asymptotics_scaled).
AsymptoticFit fit_young_asymptotics(const YoungFunction& f, double t_lo,
                                    double t_hi, const ScaledFitOptions& opt);

/// One verified cell of the catalog table: an estimated asymptotic
/// coefficient of a constructed object against its closed-form prediction.
struct CellCheck {
  std::string id;          // e.g. "catalog-table/psi_star/power_log[q=2,a=0.5]/log_power"
  double value = 0;        // estimated
  double expected = 0;     // closed form
  double tolerance = 0;
  double fit_residual = 0; // max log-level residual of the underlying fit
  bool pass = false;
};

struct VerificationReport {
  std::vector<CellCheck> rows;
  bool all_pass = false;
};

struct Table1Options {
  std::vector<double> qs = {2.0, 2.5, 4.0, 6.0};
  std::vector<double> alphas = {-1.0, 0.5, 1.5};
  double window_lo = 1e3;
  double window_hi = 1e8;
  double tol_exponent = 1e-2;
  double tol_log_power = 5e-2;
  /// Tolerance (relative) for the inner exponents of the exponential-type
  /// q = d cells, which are checked through log psi_d instead.
  double tol_inner = 2e-2;
  bool include_critical = true;  // add the q = d rows (not gated by q-list)
};

/// Reconstructs every applicable cell of the catalog table at dimension d:
/// psi* for all q, psi_d for q < d (and the exponential q = d rows),
/// varpi for q > d, across the power / power-log / power-loglog families.
VerificationReport table1_reproduce(int d, const Table1Options& opt = {});

}  // namespace orlicz

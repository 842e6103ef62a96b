#pragma once

#include <functional>
#include <vector>

namespace orlicz {

/// Result of fitting log f(t) ~ C + p log t + a loglog t + b logloglog t
/// over a log-spaced window.
struct AsymptoticFit {
  double exponent = 0;      // p
  double log_power = 0;     // a
  double loglog_power = 0;  // b
  double intercept = 0;     // C
  double residual_rms = 0;  // rms of log-level residuals over the window
  double residual_max = 0;  // max |log-level residual| over the window
  double window_lo = 0;
  double window_hi = 0;
};

/// Plain least-squares fit of log f against {1, log t, loglog t
/// [, logloglog t]}.  `log_f(x)` evaluates log f at x = log t.  Requires
/// t_lo > 3 so the nested logs are well defined, and at least one decade of
/// window.  This is the generic instrument; it carries the full
/// finite-window bias of whatever subleading corrections f has, so it is
/// accurate only when f is close to an exact basis member on the window.
AsymptoticFit fit_asymptotics(const std::function<double(double)>& log_f,
                              double t_lo, double t_hi, int n = 240,
                              bool fit_loglog = true);

/// Which iterated-log factor multiplies the power law being estimated.
/// `log` estimates the coefficient a in f ~ t^p (log t)^a; `loglog`
/// estimates b in f ~ t^p (loglog t)^b.
enum class LogFamily { log, loglog };

/// How the effective argument w(x) (the scale at which the logarithmic
/// factor of f varies) is obtained:
///  - direct:   w = x (f's own argument);
///  - legendre: w = log f'(t) + log f(t)... i.e. log of the Legendre argmax
///              t*(s) = d f / d s, recovered from f's own slopes; use when f
///              is a convex conjugate, whose log factor varies on the scale
///              of the pre-conjugate variable;
///  - mapped:   w supplied by the caller (e.g. the inner table of a
///              composed construction).
/// The estimated coefficients converge to the true asymptotic exponent and
/// log-power for ANY inner scale that is asymptotically a power law of t;
/// the choice only controls the finite-window convergence rate.
enum class InnerScale { direct, legendre, mapped };

struct ScaledFitOptions {
  LogFamily family = LogFamily::log;
  InnerScale scale = InnerScale::direct;
  /// x = log t  ->  w = log(effective argument); used when scale == mapped.
  std::function<double(double)> inner_log;
  /// Number of correction regressors g, g^2 with
  /// g = u/((e+u) log(e+u)) at u = e^w (the leading correction shape of
  /// power-log asymptotics; the loglog analogue for LogFamily::loglog).
  /// They absorb the slowly-decaying subleading terms so the basis
  /// coefficients are unbiased to O(g^{order+1}).
  int correction_order = 2;
  int samples = 240;
};

/// Scale-adapted least-squares fit of log f on the asymptotic basis
/// evaluated at the construction's effective argument, augmented with the
/// leading correction shapes.  `log_f(x)` and `slope(x) = d log f / d log t`
/// sample the tabulation (slopes are exact for table-backed functions).
/// Returns exponent plus log_power or loglog_power according to `family`
/// (the inactive one is 0).
AsymptoticFit fit_asymptotics_scaled(
    const std::function<double(double)>& log_f,
    const std::function<double(double)>& slope, double t_lo, double t_hi,
    const ScaledFitOptions& opt = {});

/// Fits log g(t) ~ C + p log t for the *inner* exponent of
/// exponential-regime functions (g = log of the function under study), on
/// windows too short for the full basis.  Two-pass: a first plain fit of
/// (C, p), then a refit with nuisance columns exp(-p_hat x) and
/// x exp(-p_hat x), the shapes of the relative error of
/// log((a x + g0) + c t^p) against its power part, so additive and
/// slowly-varying offsets do not bias the exponent.
struct InnerExponentFit {
  double exponent = 0;
  double intercept = 0;
  double residual_rms = 0;
};
InnerExponentFit fit_inner_exponent(const std::function<double(double)>& log_g,
                                    double t_lo, double t_hi, int n = 120);

/// Low-level helper: least-squares fit of y against caller-supplied columns
/// (each cols[j] has y.size() entries).  Columns are max-abs scaled before
/// the QR solve so measured columns of very different magnitude coexist.
/// Returns the coefficients in the caller's column order plus the
/// max/rms absolute residuals.
struct ColumnFit {
  std::vector<double> coef;
  double residual_rms = 0;
  double residual_max = 0;
};
ColumnFit fit_columns(const std::vector<double>& y,
                      const std::vector<std::vector<double>>& cols);

}  // namespace orlicz

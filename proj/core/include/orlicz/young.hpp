#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>

#include "orlicz/tabulated.hpp"

namespace orlicz {

/// An N-function: convex, increasing on [0, inf), psi(t)/t -> 0 at 0 and
/// -> inf at infinity. Closed-form families plus a numeric closure backed by
/// a log-log table. Values may overflow double for the exponential families;
/// log_value and log_derivative stay representable across the stated hull.
class YoungFunction {
 public:
  enum class FamilyKind {
    power,
    power_log,
    power_loglog,
    entropy,
    exponential,
    exp_power,
    double_exp,
    table
  };

  YoungFunction() = default;

  // --- catalog -----------------------------------------------------------
  static YoungFunction power(double q, double scale = 1.0);
  /// t^q log(e+t)^alpha for q > 1 (any alpha); t log(1+t)^alpha for q == 1
  /// (requires alpha > 0).
  static YoungFunction power_log(double q, double alpha);
  /// t^q log(log(e^e + t))^alpha, q > 1.
  static YoungFunction power_loglog(double q, double alpha);
  /// (1+t) log(1+t) - t.
  static YoungFunction entropy();
  /// e^t - t - 1.
  static YoungFunction exponential();
  /// exp(t^a) - 1 - t^a, a >= 1.
  static YoungFunction exp_power(double a);
  /// exp(exp(t^a)) - e - e t^a, a >= 1.
  static YoungFunction double_exp(double a);
  /// Numeric closure over a tabulated log-log representation.
  static YoungFunction from_table(LogLogTable table, std::string label = "table");

  // --- evaluation ---------------------------------------------------------
  double operator()(double t) const;        // value; +inf on overflow
  double log_value(double t) const;         // requires t > 0 inside hull
  double derivative(double t) const;        // right derivative
  double log_derivative(double t) const;    // log of derivative, overflow-safe
  /// Generalized left inverse: inf{ t : psi(t) >= s }; inverse(0) = 0.
  double inverse(double s) const;

  /// Positive-argument range over which log_value is representable.
  std::pair<double, double> hull() const;

  const std::string& label() const;
  FamilyKind kind() const;
  double param_q() const;      // power / power_log / power_loglog
  double param_alpha() const;  // power_log / power_loglog
  double param_scale() const;  // power
  double param_a() const;      // exp_power / double_exp
  bool is_table() const;
  const LogLogTable* table() const;         // nullptr unless is_table()
  /// For table-backed functions: hull policy control (strict by default).
  void set_policy(HullPolicy p);

  explicit operator bool() const { return static_cast<bool>(impl_); }

  struct Impl;

 private:
  explicit YoungFunction(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

struct ConjugateOptions {
  double t_lo = 1e-14;   // intersected with the hull of psi
  double t_hi = 1e14;
  int per_decade = 400;
  HullPolicy policy = HullPolicy::strict;
};

/// Legendre conjugate psi*(s) = sup_t (st - psi(t)). Closed form for the
/// power family and the entropy/exponential pair; otherwise a log-domain
/// maximization tabulated with exact slopes ((psi*)'(s) = argmax t).
YoungFunction conjugate(const YoungFunction& psi,
                        const ConjugateOptions& opts = {});

struct GrowthOptions {
  LogGrid probe{1e-8, 1e8, 50};
  double fit_lo = 1e2;
  double fit_hi = 1e8;
  double net_alphas[4] = {2, 4, 8, 16};
};

struct GrowthReport {
  double doubling_max = 0;   // sup psi(2t)/psi(t) over the probe grid
  bool delta2 = false;       // doubling ratio bounded along the grid
  bool nabla2 = false;       // conjugate satisfies delta2
  double p_minus = 0;        // headline indices from the asymptotic slope fit
  double p_plus = 0;
  double net_p_minus = 0;    // dilation-net extremes (finite-net bounds)
  double net_p_plus = 0;
  double slack_factor = 1;   // smallest L validating the two-sided power bound
  double fit_residual = 0;
};

GrowthReport growth_report(const YoungFunction& psi,
                           const GrowthOptions& opts = {});

struct CompareOptions {
  LogGrid grid{1e-8, 1e8, 100};
  double c_max = 8.0;
  double log_slack = 1e-9;   // tolerated log-domain comparison noise
  /// If the requested grid misses the common hull (exponential families),
  /// fall back to the top portion of the common hull.
  bool adapt_window = true;
};

struct PrecedesResult {
  bool holds = false;
  double witness_c = 0;      // smallest grid c with psi1(t) <= psi2(c t)
  double worst_t = 0;        // argmax of the log gap at the reported c
  double worst_log_gap = 0;  // max_t [log psi1(t) - log psi2(c t)]
  double window_lo = 0;      // actual comparison window used
  double window_hi = 0;
  bool window_adjusted = false;
};

/// Ordering psi1 precedes psi2: exists c in [1, c_max] with
/// psi1(t) <= psi2(c t) on the comparison window.
PrecedesResult precedes(const YoungFunction& psi1, const YoungFunction& psi2,
                        const CompareOptions& opts = {});

struct EquivalenceResult {
  bool holds = false;
  double witness_c = 0;
  PrecedesResult forward, backward;
};

EquivalenceResult equivalent(const YoungFunction& psi1,
                             const YoungFunction& psi2,
                             const CompareOptions& opts = {});

}  // namespace orlicz

#include "orlicz/norms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "orlicz/errors.hpp"

namespace orlicz {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// log psi(t) extended log-linearly (with the edge slope of log psi in
/// log t) outside the tabulated hull, so that table-backed conjugates can
/// be used in modulars without artificial domain errors.  The extension
/// is exact for the pure-power catalog members and preserves convexity of
/// the log-log graph.
class PsiEval {
 public:
  explicit PsiEval(const YoungFunction& psi) : psi_(&psi) {
    const auto h = psi.hull();
    lo_ = h.first * (1.0 + 1e-12);
    hi_ = h.second * (1.0 - 1e-12);
    log_lo_ = std::log(lo_);
    log_hi_ = std::log(hi_);
    val_lo_ = psi.log_value(lo_);
    val_hi_ = psi.log_value(hi_);
    slope_lo_ = slope_at(lo_);
    slope_hi_ = slope_at(hi_);
  }

  double log_value(double t) const {
    if (t < lo_) return val_lo_ + slope_lo_ * (std::log(t) - log_lo_);
    if (t > hi_) return val_hi_ + slope_hi_ * (std::log(t) - log_hi_);
    return psi_->log_value(t);
  }

 private:
  double slope_at(double t) const {
    // t psi'(t) / psi(t) = d log psi / d log t.
    return std::exp(psi_->log_derivative(t) + std::log(t) - psi_->log_value(t));
  }

  const YoungFunction* psi_;
  double lo_, hi_, log_lo_, log_hi_, val_lo_, val_hi_, slope_lo_, slope_hi_;
};

struct ModularData {
  std::vector<double> ratios;   // |f| / max|f| over carrier cells, in (0, 1]
  std::vector<double> weights;  // per-term measure
  double max_value = 0.0;       // max|f|
  double total_measure = 0.0;   // full carrier measure (including zeros)
  std::size_t argmax = 0;       // carrier index of the max, for diagnostics
};

ModularData collect_field(const SampledField& f) {
  f.validate();
  ModularData d;
  const Grid& g = f.grid;
  const double w = g.cell_volume();
  std::size_t inside_count = 0;
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    if (!g.inside[idx]) continue;
    ++inside_count;
    const double m = f.magnitude(idx);
    if (m > d.max_value) {
      d.max_value = m;
      d.argmax = idx;
    }
  }
  d.total_measure = static_cast<double>(inside_count) * w;
  if (d.max_value == 0.0) return d;
  d.ratios.reserve(inside_count);
  d.weights.reserve(inside_count);
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    if (!g.inside[idx]) continue;
    const double m = f.magnitude(idx);
    if (m == 0.0) continue;
    d.ratios.push_back(m / d.max_value);
    d.weights.push_back(w);
  }
  return d;
}

ModularData collect_profile(const RearrangedProfile& p) {
  p.validate();
  ModularData d;
  d.total_measure = p.measure();
  for (std::size_t k = 0; k < p.values.size(); ++k) {
    if (p.values[k] > d.max_value) {
      d.max_value = p.values[k];
      d.argmax = k;
    }
  }
  if (d.max_value == 0.0) return d;
  double prev = 0.0;
  for (std::size_t k = 0; k < p.values.size(); ++k) {
    const double width = p.breakpoints[k] - prev;
    prev = p.breakpoints[k];
    if (p.values[k] == 0.0) continue;
    d.ratios.push_back(p.values[k] / d.max_value);
    d.weights.push_back(width);
  }
  return d;
}

/// Modular evaluated at lambda = max_value * mu; +inf on overflow.
double modular_mu(const ModularData& d, const PsiEval& eval, double mu) {
  double acc = 0.0;
  for (std::size_t i = 0; i < d.ratios.size(); ++i) {
    const double lv = eval.log_value(d.ratios[i] / mu);
    if (lv > 700.0) return kInf;
    acc += std::exp(lv) * d.weights[i];
    if (acc > 1e306) return kInf;
  }
  return acc;
}

double lux_core(const ModularData& d, const YoungFunction& psi,
                const LuxemburgOptions& opt, const std::string& what) {
  if (d.max_value == 0.0) return 0.0;
  const PsiEval eval(psi);

  // Seed mu with 1 / psi^{-1}(1 / measure): at that lambda the modular of
  // the constant-max field is exactly 1, so it dominates from above.
  double mu_hi = 1.0;
  if (d.total_measure > 0.0) {
    try {
      mu_hi = 1.0 / psi.inverse(1.0 / d.total_measure);
    } catch (const Error&) {
      mu_hi = 1.0;  // fall back to pure doubling below
    }
  }
  if (!(mu_hi > 0.0) || !std::isfinite(mu_hi)) mu_hi = 1.0;

  int guard = 0;
  while (modular_mu(d, eval, mu_hi) > 1.0) {
    mu_hi *= 2.0;
    if (++guard > opt.max_iter || !std::isfinite(mu_hi)) {
      throw OverflowGuardError(
          "luxemburg bracket failed: modular stays above 1 (" + what + ")");
    }
  }
  double mu_lo = mu_hi;
  guard = 0;
  while (modular_mu(d, eval, mu_lo) <= 1.0) {
    mu_lo *= 0.5;
    if (++guard > 2100 || mu_lo < 1e-300) {
      throw ConvergenceError(
          "luxemburg bracket failed: modular stays below 1 (" + what + ")");
    }
  }
  for (int it = 0; it < opt.max_iter; ++it) {
    const double mid = 0.5 * (mu_lo + mu_hi);
    if (modular_mu(d, eval, mid) <= 1.0) {
      mu_hi = mid;
    } else {
      mu_lo = mid;
    }
    if (mu_hi - mu_lo <= opt.rel_tol * mu_hi) break;
  }
  return d.max_value * mu_hi;
}

}  // namespace

double orlicz_modular(const SampledField& f, const YoungFunction& psi,
                      double lambda) {
  if (!(lambda > 0.0)) throw PreconditionError("modular needs lambda > 0");
  const ModularData d = collect_field(f);
  if (d.max_value == 0.0) return 0.0;
  const PsiEval eval(psi);
  return modular_mu(d, eval, lambda / d.max_value);
}

double orlicz_modular(const RearrangedProfile& p, const YoungFunction& psi,
                      double lambda) {
  if (!(lambda > 0.0)) throw PreconditionError("modular needs lambda > 0");
  const ModularData d = collect_profile(p);
  if (d.max_value == 0.0) return 0.0;
  const PsiEval eval(psi);
  return modular_mu(d, eval, lambda / d.max_value);
}

double luxemburg_norm(const SampledField& f, const YoungFunction& psi,
                      const LuxemburgOptions& opt) {
  const ModularData d = collect_field(f);
  return lux_core(d, psi, opt,
                  "peak cell " + std::to_string(d.argmax) + ", |f| = " +
                      std::to_string(d.max_value));
}

double luxemburg_norm(const RearrangedProfile& p, const YoungFunction& psi,
                      const LuxemburgOptions& opt) {
  const ModularData d = collect_profile(p);
  return lux_core(d, psi, opt,
                  "peak step " + std::to_string(d.argmax) + ", f* = " +
                      std::to_string(d.max_value));
}

double lp_norm(const SampledField& f, double p) {
  if (!(p >= 1.0)) throw PreconditionError("lp_norm needs p >= 1");
  f.validate();
  const Grid& g = f.grid;
  const double w = g.cell_volume();
  double acc = 0.0;
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    if (!g.inside[idx]) continue;
    const double m = f.magnitude(idx);
    if (m > 0.0) acc += std::pow(m, p) * w;
  }
  return std::pow(acc, 1.0 / p);
}

double sobolev_norm(const SampledField& f, const YoungFunction& psi,
                    DerivativeStats* stats, const LuxemburgOptions& opt) {
  f.validate();
  if (f.components != 1) {
    throw PreconditionError("sobolev_norm expects a scalar field");
  }
  double total = luxemburg_norm(f, psi, opt);
  for (int a = 0; a < f.grid.dim; ++a) {
    const SampledField da = derivative(f, a, stats);
    total += luxemburg_norm(da, psi, opt);
  }
  return total;
}

ScaledBallNorm scaled_ball_norm(const SampledField& f, const YoungFunction& psi,
                                double r, const LuxemburgOptions& opt) {
  if (!(r > 0.0)) throw PreconditionError("scaled_ball_norm needs r > 0");
  f.validate();
  if (f.components != 1) {
    throw PreconditionError("scaled_ball_norm expects a scalar field");
  }
  SampledField grad = make_vector(f.grid);
  for (int a = 0; a < f.grid.dim; ++a) {
    const SampledField da = derivative(f, a, nullptr);
    for (std::size_t idx = 0; idx < f.grid.size(); ++idx) {
      grad.value(a, idx) = da.values[idx];
    }
  }
  ScaledBallNorm out;
  out.gradient_term = luxemburg_norm(grad, psi, opt);
  out.lower_term = luxemburg_norm(f, psi, opt) / (2.0 * r);
  return out;
}

double lorentz_norm(const RearrangedProfile& p, double pexp, double qexp) {
  if (!(pexp > 1.0)) throw PreconditionError("lorentz_norm needs p > 1");
  if (!(qexp >= 1.0)) throw PreconditionError("lorentz_norm needs q >= 1");
  p.validate();
  if (p.values.empty()) return 0.0;
  if (std::isinf(qexp)) {
    double best = 0.0;
    for (std::size_t k = 0; k < p.values.size(); ++k) {
      // t^{1/p} f*(t) on a flat step is maximized at the right endpoint.
      best = std::max(best, std::pow(p.breakpoints[k], 1.0 / pexp) * p.values[k]);
    }
    return best;
  }
  const double a = qexp / pexp;
  double acc = 0.0;
  double prev = 0.0;
  for (std::size_t k = 0; k < p.values.size(); ++k) {
    const double v = p.values[k];
    if (v > 0.0) {
      acc += std::pow(v, qexp) *
             (std::pow(p.breakpoints[k], a) - std::pow(prev, a));
    }
    prev = p.breakpoints[k];
  }
  return std::pow(acc * pexp / qexp, 1.0 / qexp);
}

double lorentz_norm(const SampledField& f, double pexp, double qexp) {
  return lorentz_norm(rearrange(f), pexp, qexp);
}

}  // namespace orlicz

#include "orlicz/young.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "orlicz/asymptotic_fit.hpp"
#include "orlicz/errors.hpp"

namespace orlicz {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEE = 15.154262241479262;  // e^e
constexpr double kLn10 = 2.302585092994046;
}  // namespace

struct YoungFunction::Impl {
  enum class Family {
    power,
    power_log,
    power_loglog,
    entropy,
    exponential,
    exp_power,
    double_exp,
    table
  };

  Family family = Family::power;
  double q = 2, alpha = 0, scale = 1, a = 1;
  std::optional<LogLogTable> tab;
  std::string label;

  // --- per-family scalar formulas (t > 0 assumed) -------------------------

  double value(double t) const {
    switch (family) {
      case Family::power:
        return scale * std::pow(t, q);
      case Family::power_log: {
        if (q > 1) return std::pow(t, q) * std::pow(std::log(std::exp(1.0) + t), alpha);
        return t * std::pow(std::log1p(t), alpha);
      }
      case Family::power_loglog:
        return std::pow(t, q) * std::pow(std::log(std::log(kEE + t)), alpha);
      case Family::entropy: {
        if (t < 1e-4) {
          const double t2 = t * t;
          return t2 * (0.5 + t * (-1.0 / 6.0 + t * (1.0 / 12.0 - t / 20.0)));
        }
        return (1.0 + t) * std::log1p(t) - t;
      }
      case Family::exponential: {
        if (t < 1e-4)
          return 0.5 * t * t * (1.0 + t / 3.0 + t * t / 12.0);
        if (t > 709) return kInf;
        return std::expm1(t) - t;
      }
      case Family::exp_power: {
        const double u = std::pow(t, a);
        if (u < 1e-4)
          return 0.5 * u * u * (1.0 + u / 3.0 + u * u / 12.0);
        if (u > 709) return kInf;
        return std::expm1(u) - u;
      }
      case Family::double_exp: {
        const double u = std::pow(t, a);
        if (u < 1e-4) {
          const double e1 = std::exp(1.0);
          return e1 * u * u * (1.0 + u * (5.0 / 6.0 + u * (0.625 + u * 13.0 / 30.0)));
        }
        if (u > 3.0) {
          const double w = std::exp(u);
          if (w > 709) return kInf;
          return std::exp(w) - std::exp(1.0) * (1.0 + u);
        }
        // Mid range: long double tames the e^{e^u} - e(1+u) cancellation.
        const long double ul = static_cast<long double>(u);
        const long double v = expl(expl(ul)) - expl(1.0L) * (1.0L + ul);
        return static_cast<double>(v);
      }
      case Family::table:
        return tab->value(t);
    }
    return 0;
  }

  double log_value(double t) const {
    const double x = std::log(t);
    switch (family) {
      case Family::power:
        return std::log(scale) + q * x;
      case Family::power_log: {
        if (q > 1) return q * x + alpha * std::log(std::log(std::exp(1.0) + t));
        return x + alpha * std::log(std::log1p(t));
      }
      case Family::power_loglog:
        return q * x + alpha * std::log(std::log(std::log(kEE + t)));
      case Family::entropy:
        return std::log(value(t));
      case Family::exponential: {
        if (t <= 1e-4)
          return 2.0 * x - std::log(2.0) + std::log1p(t / 3.0 + t * t / 12.0);
        if (t <= 30.0) return std::log(std::expm1(t) - t);
        return t + std::log1p(-(1.0 + t) * std::exp(-t));
      }
      case Family::exp_power: {
        const double u = std::pow(t, a);
        if (u <= 1e-4)
          return 2.0 * a * x - std::log(2.0) + std::log1p(u / 3.0 + u * u / 12.0);
        if (u <= 30.0) return std::log(std::expm1(u) - u);
        return u + std::log1p(-(1.0 + u) * std::exp(-u));
      }
      case Family::double_exp: {
        const double u = std::pow(t, a);
        if (u <= 1e-4)
          return 1.0 + 2.0 * a * x +
                 std::log1p(u * (5.0 / 6.0 + u * (0.625 + u * 13.0 / 30.0)));
        if (u <= 3.0) return std::log(value(t));
        const double w = std::exp(u);
        return w + std::log1p(-(1.0 + u) * std::exp(1.0 - w));
      }
      case Family::table:
        return tab->log_value(t);
    }
    return 0;
  }

  double derivative(double t) const {
    switch (family) {
      case Family::power:
        return scale * q * std::pow(t, q - 1.0);
      case Family::power_log: {
        if (q > 1) {
          const double L = std::log(std::exp(1.0) + t);
          return std::pow(t, q - 1.0) * std::pow(L, alpha - 1.0) *
                 (q * L + alpha * t / (std::exp(1.0) + t));
        }
        const double L = std::log1p(t);
        if (t == 0) return 0;
        return std::pow(L, alpha - 1.0) * (L + alpha * t / (1.0 + t));
      }
      case Family::power_loglog: {
        const double G = std::log(kEE + t);
        const double Lam = std::log(G);
        return std::pow(t, q - 1.0) * std::pow(Lam, alpha - 1.0) *
               (q * Lam + alpha * t / (G * (kEE + t)));
      }
      case Family::entropy:
        return std::log1p(t);
      case Family::exponential:
        return std::expm1(t);
      case Family::exp_power: {
        const double u = std::pow(t, a);
        if (u > 709) return kInf;
        return a * std::pow(t, a - 1.0) * std::expm1(u);
      }
      case Family::double_exp: {
        const double u = std::pow(t, a);
        const double w = (u < 700) ? std::exp(u) : kInf;
        if (!(w + u < 709)) return kInf;
        return a * std::pow(t, a - 1.0) * std::exp(1.0) * std::expm1(w - 1.0 + u);
      }
      case Family::table:
        return tab->derivative(t);
    }
    return 0;
  }

  double log_derivative(double t) const {
    const double x = std::log(t);
    switch (family) {
      case Family::exponential: {
        if (t <= 30.0) return std::log(std::expm1(t));
        return t + std::log1p(-std::exp(-t));
      }
      case Family::exp_power: {
        const double u = std::pow(t, a);
        const double head = std::log(a) + (a - 1.0) * x;
        if (u <= 30.0) return head + std::log(std::expm1(u));
        return head + u + std::log1p(-std::exp(-u));
      }
      case Family::double_exp: {
        const double u = std::pow(t, a);
        const double head = std::log(a) + (a - 1.0) * x;
        if (u <= 3.0) {
          const double w1 = std::expm1(u) + u;  // w - 1 + u, no cancellation
          return head + 1.0 + std::log(std::expm1(w1));
        }
        const double w = std::exp(u);
        return head + w + u + std::log1p(-std::exp(1.0 - w - u));
      }
      case Family::table: {
        const double xx = std::log(t);
        const double sl = tab->slope_at(xx);
        if (!(sl > 0)) return -kInf;
        return std::log(sl) + tab->log_at(xx) - xx;
      }
      default: {
        const double d = derivative(t);
        return d > 0 ? std::log(d) : -kInf;
      }
    }
  }

  std::pair<double, double> hull() const {
    switch (family) {
      case Family::exp_power:
        return {1e-300, std::exp(709.0 / a)};
      case Family::double_exp:
        return {1e-300, std::exp(std::log(709.0) / a)};
      case Family::table:
        return tab->hull();
      default:
        return {1e-300, 1e300};
    }
  }
};

namespace {

using Impl = YoungFunction::Impl;

void check_n_function(const Impl& impl, const std::string& label) {
  // Spot-check convexity and positivity of the derivative: exact families
  // can still fail convexity for aggressive negative log powers.
  double prev = 0;
  for (int i = 0; i <= 64; ++i) {
    const double t = std::pow(10.0, -6.0 + 12.0 * i / 64.0);
    const double d = impl.derivative(t);
    if (!(d > 0))
      throw DomainError(label + ": derivative not positive at t=" +
                        std::to_string(t));
    if (d < prev * (1.0 - 1e-12))
      throw DomainError(label + ": derivative not nondecreasing at t=" +
                        std::to_string(t));
    prev = d;
  }
}

std::shared_ptr<const Impl> make_impl(Impl impl) {
  if (impl.family != Impl::Family::table) check_n_function(impl, impl.label);
  return std::make_shared<const Impl>(std::move(impl));
}

}  // namespace

// --- factories -------------------------------------------------------------

YoungFunction YoungFunction::power(double q, double scale) {
  if (!(q > 1.0)) throw DomainError("power family requires q > 1");
  if (!(scale > 0.0)) throw DomainError("power family requires scale > 0");
  Impl impl;
  impl.family = Impl::Family::power;
  impl.q = q;
  impl.scale = scale;
  impl.label = "power[q=" + std::to_string(q) +
               (scale != 1.0 ? ",c=" + std::to_string(scale) : "") + "]";
  YoungFunction f;
  f.impl_ = make_impl(std::move(impl));
  return f;
}

YoungFunction YoungFunction::power_log(double q, double alpha) {
  if (!(q > 1.0) && !(q == 1.0 && alpha > 0.0))
    throw DomainError("power-log family requires q > 1, or q == 1 with alpha > 0");
  Impl impl;
  impl.family = Impl::Family::power_log;
  impl.q = q;
  impl.alpha = alpha;
  impl.label = "power-log[q=" + std::to_string(q) + ",a=" + std::to_string(alpha) + "]";
  YoungFunction f;
  f.impl_ = make_impl(std::move(impl));
  return f;
}

YoungFunction YoungFunction::power_loglog(double q, double alpha) {
  if (!(q > 1.0)) throw DomainError("power-loglog family requires q > 1");
  Impl impl;
  impl.family = Impl::Family::power_loglog;
  impl.q = q;
  impl.alpha = alpha;
  impl.label =
      "power-loglog[q=" + std::to_string(q) + ",a=" + std::to_string(alpha) + "]";
  YoungFunction f;
  f.impl_ = make_impl(std::move(impl));
  return f;
}

YoungFunction YoungFunction::entropy() {
  Impl impl;
  impl.family = Impl::Family::entropy;
  impl.label = "entropy";
  YoungFunction f;
  f.impl_ = make_impl(std::move(impl));
  return f;
}

YoungFunction YoungFunction::exponential() {
  Impl impl;
  impl.family = Impl::Family::exponential;
  impl.label = "exponential";
  YoungFunction f;
  f.impl_ = make_impl(std::move(impl));
  return f;
}

YoungFunction YoungFunction::exp_power(double a) {
  if (!(a >= 1.0)) throw DomainError("exp-power family requires a >= 1");
  Impl impl;
  impl.family = Impl::Family::exp_power;
  impl.a = a;
  impl.label = "exp-power[a=" + std::to_string(a) + "]";
  YoungFunction f;
  f.impl_ = make_impl(std::move(impl));
  return f;
}

YoungFunction YoungFunction::double_exp(double a) {
  if (!(a >= 1.0)) throw DomainError("double-exp family requires a >= 1");
  Impl impl;
  impl.family = Impl::Family::double_exp;
  impl.a = a;
  impl.label = "double-exp[a=" + std::to_string(a) + "]";
  YoungFunction f;
  f.impl_ = make_impl(std::move(impl));
  return f;
}

YoungFunction YoungFunction::from_table(LogLogTable table, std::string label) {
  Impl impl;
  impl.family = Impl::Family::table;
  impl.tab = std::move(table);
  impl.label = std::move(label);
  YoungFunction f;
  f.impl_ = std::make_shared<const Impl>(std::move(impl));
  return f;
}

// --- evaluation --------------------------------------------------------------

double YoungFunction::operator()(double t) const {
  if (!impl_) throw DomainError("empty YoungFunction");
  if (t < 0) throw DomainError("Young function argument must be nonnegative");
  if (t == 0) return 0;
  return impl_->value(t);
}

double YoungFunction::log_value(double t) const {
  if (!impl_) throw DomainError("empty YoungFunction");
  if (!(t > 0)) throw DomainError("log_value requires t > 0");
  return impl_->log_value(t);
}

double YoungFunction::derivative(double t) const {
  if (!impl_) throw DomainError("empty YoungFunction");
  if (t < 0) throw DomainError("Young function argument must be nonnegative");
  if (t == 0) return 0;
  return impl_->derivative(t);
}

double YoungFunction::log_derivative(double t) const {
  if (!impl_) throw DomainError("empty YoungFunction");
  if (!(t > 0)) throw DomainError("log_derivative requires t > 0");
  return impl_->log_derivative(t);
}

double YoungFunction::inverse(double s) const {
  if (!impl_) throw DomainError("empty YoungFunction");
  if (s < 0) throw DomainError("inverse requires s >= 0");
  if (s == 0) return 0;
  if (std::isinf(s)) return kInf;
  if (impl_->family == Impl::Family::power)
    return std::exp((std::log(s) - std::log(impl_->scale)) / impl_->q);
  if (impl_->family == Impl::Family::table)
    return impl_->tab->inverse(s);

  const double ls = std::log(s);
  auto [hlo, hhi] = impl_->hull();
  double xa = std::max(std::log(hlo), -690.0);
  double xb = std::log(hhi);
  if (impl_->log_value(std::exp(xa)) >= ls) return std::exp(xa);
  for (int i = 0; i < 120 && (xb - xa) > 1e-13 * (1.0 + std::abs(xb)); ++i) {
    const double xm = 0.5 * (xa + xb);
    (impl_->log_value(std::exp(xm)) >= ls ? xb : xa) = xm;
  }
  return std::exp(xb);
}

std::pair<double, double> YoungFunction::hull() const {
  if (!impl_) throw DomainError("empty YoungFunction");
  return impl_->hull();
}

const std::string& YoungFunction::label() const {
  static const std::string empty = "(empty)";
  return impl_ ? impl_->label : empty;
}

bool YoungFunction::is_table() const {
  return impl_ && impl_->family == Impl::Family::table;
}

const LogLogTable* YoungFunction::table() const {
  return is_table() ? &*impl_->tab : nullptr;
}

void YoungFunction::set_policy(HullPolicy p) {
  if (!is_table()) return;
  auto copy = std::make_shared<Impl>(*impl_);
  copy->tab->set_policy(p);
  impl_ = copy;
}

YoungFunction::FamilyKind YoungFunction::kind() const {
  if (!impl_) throw DomainError("empty YoungFunction");
  switch (impl_->family) {
    case Impl::Family::power: return FamilyKind::power;
    case Impl::Family::power_log: return FamilyKind::power_log;
    case Impl::Family::power_loglog: return FamilyKind::power_loglog;
    case Impl::Family::entropy: return FamilyKind::entropy;
    case Impl::Family::exponential: return FamilyKind::exponential;
    case Impl::Family::exp_power: return FamilyKind::exp_power;
    case Impl::Family::double_exp: return FamilyKind::double_exp;
    case Impl::Family::table: return FamilyKind::table;
  }
  return FamilyKind::table;
}

double YoungFunction::param_q() const { return impl_ ? impl_->q : 0; }
double YoungFunction::param_alpha() const { return impl_ ? impl_->alpha : 0; }
double YoungFunction::param_scale() const { return impl_ ? impl_->scale : 0; }
double YoungFunction::param_a() const { return impl_ ? impl_->a : 0; }

// --- conjugation -------------------------------------------------------------

namespace {

// G(x) = log(s t - psi(t)) at t = e^x, computed without forming s t.
double conj_objective(const YoungFunction& psi, double log_s, double x) {
  const double y = psi.log_value(std::exp(x));
  const double expo = y - x - log_s;  // log(psi(t)/(s t))
  if (expo >= -1e-18) return -kInf;
  return x + log_s + std::log1p(-std::exp(expo));
}

// Golden-section maximum of a unimodal G on [a, b] starting near x0.
double golden_max(const std::function<double(double)>& G, double a, double b,
                  double x0) {
  const double gr = 0.6180339887498949;
  double lo = a, hi = b;
  // Shrink the bracket around x0 by an uphill walk when it helps.
  const double step = 0.15;
  double xc = std::min(std::max(x0, a), b);
  double gc = G(xc);
  double xr = std::min(xc + step, b), xl = std::max(xc - step, a);
  if (G(xr) > gc) {
    double prev = xc, cur = xr, gcur = G(xr);
    while (cur < b) {
      const double nxt = std::min(cur + step, b);
      const double gn = G(nxt);
      if (gn <= gcur) { lo = prev; hi = nxt; break; }
      prev = cur; cur = nxt; gcur = gn;
      if (nxt >= b) { lo = prev; hi = b; break; }
    }
    if (cur >= b) { lo = prev; hi = b; }
  } else if (G(xl) > gc) {
    double prev = xc, cur = xl, gcur = G(xl);
    while (cur > a) {
      const double nxt = std::max(cur - step, a);
      const double gn = G(nxt);
      if (gn <= gcur) { lo = nxt; hi = prev; break; }
      prev = cur; cur = nxt; gcur = gn;
      if (nxt <= a) { lo = a; hi = prev; break; }
    }
    if (cur <= a) { lo = a; hi = prev; }
  } else {
    lo = xl;
    hi = xr;
  }
  double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
  double g1 = G(x1), g2 = G(x2);
  for (int i = 0; i < 70 && (hi - lo) > 1e-13 * (1.0 + std::abs(lo)); ++i) {
    if (g1 < g2) {
      lo = x1; x1 = x2; g1 = g2;
      x2 = lo + gr * (hi - lo); g2 = G(x2);
    } else {
      hi = x2; x2 = x1; g2 = g1;
      x1 = hi - gr * (hi - lo); g1 = G(x1);
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

YoungFunction conjugate(const YoungFunction& psi, const ConjugateOptions& opts) {
  if (!psi) throw DomainError("conjugate of empty YoungFunction");
  using FK = YoungFunction::FamilyKind;
  switch (psi.kind()) {
    case FK::power: {
      const double q = psi.param_q(), c = psi.param_scale();
      const double qp = q / (q - 1.0);
      return YoungFunction::power(qp,
                                  (q - 1.0) * std::pow(q, -qp) *
                                      std::pow(c, -1.0 / (q - 1.0)));
    }
    case FK::entropy:
      return YoungFunction::exponential();
    case FK::exponential:
      return YoungFunction::entropy();
    default:
      break;
  }

  auto [hlo, hhi] = psi.hull();
  double A = std::max(hlo, opts.t_lo);
  double B = std::min(hhi, opts.t_hi);
  if (!(B > A * 10.0))
    throw DomainError("conjugate: usable t-window is below one decade");
  double xA = std::log(A), xB = std::log(B);

  // Cap the upper end so that s = psi'(t) stays representable.
  if (psi.log_derivative(B) > 667.0) {
    double lo = xA, hi = xB;
    for (int i = 0; i < 200 && hi - lo > 1e-12 * (1 + std::abs(hi)); ++i) {
      const double mid = 0.5 * (lo + hi);
      (psi.log_derivative(std::exp(mid)) > 667.0 ? hi : lo) = mid;
    }
    xB = lo;
    B = std::exp(xB);
  }
  const double ls_lo = psi.log_derivative(A) + 1e-6;
  const double ls_hi = psi.log_derivative(B) - 1e-6;
  if (!(ls_hi > ls_lo + kLn10))
    throw DomainError("conjugate: derivative range is below one decade");

  const int n = std::max(
      2, static_cast<int>(std::ceil((ls_hi - ls_lo) / kLn10 * opts.per_decade)) + 1);
  std::vector<double> xs(n), ys(n), slopes(n);
  double x_prev = xA;
  for (int i = 0; i < n; ++i) {
    const double ls = ls_lo + (ls_hi - ls_lo) * i / (n - 1);
    auto G = [&](double x) { return conj_objective(psi, ls, x); };
    const double x_star = golden_max(G, xA, xB, x_prev);
    const double y_star = G(x_star);
    if (!std::isfinite(y_star))
      throw ConvergenceError("conjugate: maximization failed at log s = " +
                             std::to_string(ls));
    xs[i] = ls;
    ys[i] = y_star;
    slopes[i] = std::exp(ls + x_star - y_star);  // (psi*)'(s) = t*(s)
    x_prev = x_star;
  }
  LogLogTable tab(xs, ys, slopes, opts.policy);
  return YoungFunction::from_table(std::move(tab), "conj(" + psi.label() + ")");
}

// --- growth report -------------------------------------------------------------

namespace {

// Doubling-ratio boundedness along a log-spaced probe grid.
struct DoublingScan {
  double max_log_ratio = -kInf;
  bool bounded = false;
};

DoublingScan doubling_scan(const YoungFunction& psi, const LogGrid& probe) {
  auto [hlo, hhi] = psi.hull();
  const double lo = std::max(probe.lo, hlo);
  const double hi = std::min(probe.hi, hhi / 2.0);
  if (!(hi > lo * 100.0))
    throw DomainError("doubling scan: usable window is below two decades");
  const int n = std::max(
      16, static_cast<int>(std::ceil(std::log10(hi / lo) * probe.per_decade)));
  DoublingScan scan;
  double r_top = 0, r_prev = 0;
  const double x_lo = std::log(lo), x_hi = std::log(hi);
  for (int i = 0; i <= n; ++i) {
    const double x = x_lo + (x_hi - x_lo) * i / n;
    const double t = std::exp(x);
    const double r = psi.log_value(2.0 * t) - psi.log_value(t);
    scan.max_log_ratio = std::max(scan.max_log_ratio, r);
    if (i == n) r_top = r;
    if (std::abs(x - (x_hi - kLn10)) < 0.5 * (x_hi - x_lo) / n) r_prev = r;
  }
  scan.bounded = (r_top - r_prev) <= 0.2;
  return scan;
}

}  // namespace

GrowthReport growth_report(const YoungFunction& psi, const GrowthOptions& opts) {
  if (!psi) throw DomainError("growth_report of empty YoungFunction");
  GrowthReport rep;

  const auto scan = doubling_scan(psi, opts.probe);
  rep.doubling_max =
      scan.max_log_ratio > 700 ? kInf : std::exp(scan.max_log_ratio);
  rep.delta2 = scan.bounded;

  {
    ConjugateOptions copts;
    const auto scan_conj = doubling_scan(conjugate(psi, copts), opts.probe);
    rep.nabla2 = scan_conj.bounded;
  }

  auto [hlo, hhi] = psi.hull();

  // Dilation-net extremes over the probe window.
  rep.net_p_minus = -kInf;
  rep.net_p_plus = kInf;
  double max_viol = 0;
  {
    const double lo = std::max(opts.probe.lo, hlo);
    const double hi = std::min(opts.probe.hi, hhi / 16.0);
    const int n = std::max(
        16, static_cast<int>(std::ceil(std::log10(hi / lo) * opts.probe.per_decade)));
    for (double a : opts.net_alphas) {
      const double la = std::log(a);
      double rmin = kInf, rmax = -kInf;
      for (int i = 0; i <= n; ++i) {
        const double t = std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * i / n);
        const double r = (psi.log_value(a * t) - psi.log_value(t)) / la;
        rmin = std::min(rmin, r);
        rmax = std::max(rmax, r);
      }
      rep.net_p_minus = std::max(rep.net_p_minus, rmin);
      rep.net_p_plus = std::min(rep.net_p_plus, rmax);
    }
  }

  // Headline indices: asymptotic slope fit when the window allows it.
  double fit_lo = std::max(opts.fit_lo, hlo);
  double fit_hi = std::min(opts.fit_hi, hhi * 0.99);
  if (fit_hi < opts.fit_hi) fit_lo = std::max(4.0, std::pow(fit_hi, 0.3));
  bool have_fit = false;
  if (fit_hi > fit_lo * 10.0 && fit_lo > 3.0) {
    const auto fit = fit_asymptotics(
        [&](double x) { return psi.log_value(std::exp(x)); }, fit_lo, fit_hi);
    rep.fit_residual = fit.residual_rms;
    if (fit.residual_rms < 0.05) {
      rep.p_minus = rep.p_plus = fit.exponent;
      have_fit = true;
    }
  }
  if (!have_fit) {
    rep.p_minus = rep.net_p_minus;
    rep.p_plus = rep.net_p_plus;
    if (!(rep.p_minus <= rep.p_plus))
      std::swap(rep.p_minus, rep.p_plus);
  }

  // Smallest L validating L^-1 a^{p-} <= psi(at)/psi(t) <= L a^{p+} on the net.
  {
    const double lo = std::max(opts.probe.lo, hlo);
    const double hi = std::min(opts.probe.hi, hhi / 16.0);
    const int n = std::max(
        16, static_cast<int>(std::ceil(std::log10(hi / lo) * opts.probe.per_decade)));
    for (double a : opts.net_alphas) {
      const double la = std::log(a);
      for (int i = 0; i <= n; ++i) {
        const double t = std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * i / n);
        const double r = psi.log_value(a * t) - psi.log_value(t);
        max_viol = std::max({max_viol, r - rep.p_plus * la, rep.p_minus * la - r});
      }
    }
    rep.slack_factor = max_viol > 700 ? kInf : std::exp(max_viol);
  }
  return rep;
}

// --- ordering ------------------------------------------------------------------

namespace {

struct GapResult {
  double max_gap = -kInf;
  double arg_t = 0;
};

GapResult log_gap(const YoungFunction& f1, const YoungFunction& f2, double c,
                  double x_lo, double x_hi, int n) {
  GapResult g;
  for (int i = 0; i <= n; ++i) {
    const double x = x_lo + (x_hi - x_lo) * i / n;
    const double t = std::exp(x);
    const double gap = f1.log_value(t) - f2.log_value(c * t);
    if (gap > g.max_gap) {
      g.max_gap = gap;
      g.arg_t = t;
    }
  }
  return g;
}

}  // namespace

PrecedesResult precedes(const YoungFunction& psi1, const YoungFunction& psi2,
                        const CompareOptions& opts) {
  if (!psi1 || !psi2) throw DomainError("precedes of empty YoungFunction");
  if (!(opts.c_max >= 1.0)) throw DomainError("precedes requires c_max >= 1");
  auto [lo1, hi1] = psi1.hull();
  auto [lo2, hi2] = psi2.hull();
  const double lo_c = std::max(lo1, lo2);
  const double hi_c = std::min(hi1, hi2 / opts.c_max);
  if (!(hi_c > lo_c * 10.0))
    throw DomainError("precedes: common hull is below one decade");

  PrecedesResult res;
  double w_lo = std::max(opts.grid.lo, lo_c);
  double w_hi = std::min(opts.grid.hi, hi_c);
  if (!(w_hi > w_lo * 10.0)) {
    if (!opts.adapt_window)
      throw DomainError("precedes: requested window misses the common hull");
    const double xl = std::log(lo_c), xh = std::log(hi_c);
    w_lo = std::exp(xh - 0.6 * (xh - xl));
    w_hi = hi_c;
    res.window_adjusted = true;
  }
  res.window_lo = w_lo;
  res.window_hi = w_hi;
  const double x_lo = std::log(w_lo), x_hi = std::log(w_hi);
  const int n = std::max(
      64, static_cast<int>(std::ceil(std::log10(w_hi / w_lo) * opts.grid.per_decade)));

  const auto g1 = log_gap(psi1, psi2, 1.0, x_lo, x_hi, n);
  if (g1.max_gap <= opts.log_slack) {
    res.holds = true;
    res.witness_c = 1.0;
    res.worst_t = g1.arg_t;
    res.worst_log_gap = g1.max_gap;
    return res;
  }
  const auto gM = log_gap(psi1, psi2, opts.c_max, x_lo, x_hi, n);
  if (gM.max_gap > opts.log_slack) {
    res.holds = false;
    res.witness_c = opts.c_max;
    res.worst_t = gM.arg_t;
    res.worst_log_gap = gM.max_gap;
    return res;
  }
  double lc_bad = 0.0, lc_good = std::log(opts.c_max);
  GapResult g_good = gM;
  for (int i = 0; i < 60 && (lc_good - lc_bad) > 1e-10; ++i) {
    const double lc = 0.5 * (lc_bad + lc_good);
    const auto g = log_gap(psi1, psi2, std::exp(lc), x_lo, x_hi, n);
    if (g.max_gap <= opts.log_slack) {
      lc_good = lc;
      g_good = g;
    } else {
      lc_bad = lc;
    }
  }
  res.holds = true;
  res.witness_c = std::exp(lc_good);
  res.worst_t = g_good.arg_t;
  res.worst_log_gap = g_good.max_gap;
  return res;
}

EquivalenceResult equivalent(const YoungFunction& psi1, const YoungFunction& psi2,
                             const CompareOptions& opts) {
  EquivalenceResult res;
  res.forward = precedes(psi1, psi2, opts);
  res.backward = precedes(psi2, psi1, opts);
  res.holds = res.forward.holds && res.backward.holds;
  res.witness_c = std::max(res.forward.witness_c, res.backward.witness_c);
  return res;
}

}  // namespace orlicz

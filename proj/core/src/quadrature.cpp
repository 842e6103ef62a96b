#include "orlicz/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "orlicz/errors.hpp"

namespace orlicz {
namespace {

constexpr double kLn10 = 2.302585092994046;

// 5-point Gauss-Legendre on [-1, 1].
constexpr double kGx[5] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                           0.5384693101056831, 0.9061798459386640};
constexpr double kGw[5] = {0.2369268850561891, 0.4786286704993665,
                           0.5688888888888889, 0.4786286704993665,
                           0.2369268850561891};

// log of (h/2) * sum_i w_i exp(g_i) for one segment [xa, xb],
// g(x) = log_f(x) + x (the Jacobian of t = e^x).
double log_segment(const std::function<double(double)>& log_f, double xa,
                   double xb) {
  const double h = xb - xa;
  double g[5];
  double m = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < 5; ++i) {
    const double x = 0.5 * (xa + xb) + 0.5 * h * kGx[i];
    g[i] = log_f(x) + x;
    if (std::isnan(g[i])) throw QuadratureError("integrand returned NaN");
    m = std::max(m, g[i]);
  }
  if (!std::isfinite(m)) {
    if (m > 0) throw QuadratureError("integrand overflowed inside a segment");
    return -std::numeric_limits<double>::infinity();
  }
  double s = 0;
  for (int i = 0; i < 5; ++i) s += kGw[i] * std::exp(g[i] - m);
  return m + std::log(0.5 * h * s);
}

std::vector<double> log_nodes(double t_lo, double t_hi, int per_decade) {
  if (!(t_lo > 0) || !(t_hi > t_lo))
    throw DomainError("integration bounds must satisfy 0 < t_lo < t_hi");
  if (per_decade < 8) throw DomainError("per_decade must be at least 8");
  const double x_lo = std::log(t_lo), x_hi = std::log(t_hi);
  const int n = std::max(2, static_cast<int>(std::ceil(
                                (x_hi - x_lo) / kLn10 * per_decade)) +
                                1);
  std::vector<double> xs(n);
  for (int i = 0; i < n; ++i)
    xs[i] = x_lo + (x_hi - x_lo) * static_cast<double>(i) / (n - 1);
  return xs;
}

}  // namespace

double logsumexp(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(std::min(a, b) - m));
}

EdgeSlope fit_edge_slope(const std::function<double(double)>& log_f,
                         double x_edge, double width, bool leftward, int n) {
  if (n < 3) throw DomainError("edge fit needs at least 3 samples");
  const double dir = leftward ? -1.0 : 1.0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    const double x = x_edge + dir * width * static_cast<double>(i) / (n - 1);
    const double y = log_f(x);
    if (!std::isfinite(y))
      throw QuadratureError("non-finite integrand while fitting edge slope");
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double det = n * sxx - sx * sx;
  EdgeSlope e;
  e.slope = (n * sxy - sx * sy) / det;
  e.log_value_at_edge = log_f(x_edge);
  return e;
}

CumulativeResult cumulative_from_zero(
    const std::function<double(double)>& log_f, double t_lo, double t_hi,
    int per_decade, bool allow_divergent_head) {
  const auto xs = log_nodes(t_lo, t_hi, per_decade);
  const auto edge = fit_edge_slope(log_f, xs.front(), 0.8 * kLn10, false);

  CumulativeResult out;
  out.head_exponent = edge.slope;
  out.head_converges = edge.slope > -1.0 + kDivergenceMargin;
  if (!out.head_converges && !allow_divergent_head)
    throw QuadratureError("integral diverges at t -> 0 (fitted exponent " +
                          std::to_string(edge.slope) + ")");

  // Head: integral of the fitted power law over (0, t_lo].
  double acc = out.head_converges
                   ? edge.log_value_at_edge + xs.front() -
                         std::log(edge.slope + 1.0)
                   : -std::numeric_limits<double>::infinity();

  const size_t n = xs.size();
  std::vector<double> ys, slopes, kept_x;
  ys.reserve(n);
  slopes.reserve(n);
  kept_x.reserve(n);
  auto push = [&](double x, double y) {
    if (!std::isfinite(y)) return;
    kept_x.push_back(x);
    ys.push_back(y);
    slopes.push_back(std::exp(x + log_f(x) - y));  // dY/dx = t f(t) / F(t)
  };
  push(xs[0], acc);
  for (size_t k = 0; k + 1 < n; ++k) {
    acc = logsumexp(acc, log_segment(log_f, xs[k], xs[k + 1]));
    push(xs[k + 1], acc);
  }
  if (kept_x.size() < 2)
    throw QuadratureError("cumulative integral produced fewer than 2 nodes");
  out.log_total = ys.back();
  out.F = LogLogTable(kept_x, ys, slopes, HullPolicy::strict);
  return out;
}

TailResult cumulative_to_infinity(const std::function<double(double)>& log_f,
                                  double t_lo, double t_hi, int per_decade,
                                  bool allow_divergent_tail) {
  const auto xs = log_nodes(t_lo, t_hi, per_decade);
  const auto edge = fit_edge_slope(log_f, xs.back(), 0.8 * kLn10, true);

  TailResult out;
  out.tail_exponent = edge.slope;
  out.tail_converges = edge.slope < -1.0 - kDivergenceMargin;
  if (!out.tail_converges && !allow_divergent_tail)
    throw QuadratureError(
        "integral diverges at t -> infinity (fitted exponent " +
        std::to_string(edge.slope) + ")");

  const size_t n = xs.size();
  std::vector<double> seg(n - 1);
  for (size_t k = 0; k + 1 < n; ++k)
    seg[k] = log_segment(log_f, xs[k], xs[k + 1]);

  // Tail beyond t_hi: fitted power law integrated analytically.  Near the
  // -1 borderline a local power law cannot be told from t^{-1} times an
  // iterated-log factor by the slope alone, but the two move differently
  // along the axis (a power keeps the deficit delta = -slope - 1 constant,
  // an iterated-log tail has delta ~ beta / log t), and their remainders
  // differ by the factor delta * log t / (beta - 1).  Probe the slope two
  // decades in to pick the right closed form.
  std::vector<double> ys(n);
  ys[n - 1] = -std::numeric_limits<double>::infinity();
  if (out.tail_converges) {
    const double x1 = xs.back();
    const double delta = -edge.slope - 1.0;
    double log_remainder = edge.log_value_at_edge + x1 - std::log(delta);
    if (delta < 0.15 && x1 > 4.0 * kLn10) {
      const double x2 = x1 - 2.0 * kLn10;
      const auto inner = fit_edge_slope(log_f, x2, 0.8 * kLn10, true);
      const double delta_in = -inner.slope - 1.0;
      if (delta_in > delta * (1.0 + 0.5 * (x1 / x2 - 1.0))) {
        const double beta = delta * x1;  // f ~ t^{-1} (log t)^{-beta}
        if (beta <= 1.2)
          throw QuadratureError(
              "tail integral is marginal (iterated-log exponent " +
              std::to_string(beta) + "); remainder not computable reliably");
        log_remainder = edge.log_value_at_edge + x1 + std::log(x1) -
                        std::log(beta - 1.0);
      }
    }
    ys[n - 1] = log_remainder;
  }
  for (size_t k = n - 1; k-- > 0;) ys[k] = logsumexp(ys[k + 1], seg[k]);

  std::vector<double> slopes(n);
  for (size_t k = 0; k < n; ++k)
    slopes[k] = -std::exp(xs[k] + log_f(xs[k]) - ys[k]);  // dT/dx = -t f(t)/T

  // A divergent-but-allowed tail leaves the last node at -inf; drop it.
  std::vector<double> kx(xs.begin(), xs.end());
  if (!std::isfinite(ys.back())) {
    kx.pop_back();
    ys.pop_back();
    slopes.pop_back();
  }
  if (kx.size() < 2)
    throw QuadratureError("tail integral produced fewer than 2 nodes");
  out.log_total = ys.front();
  out.T = LogLogTable(kx, ys, slopes, HullPolicy::strict);
  return out;
}

double log_integral(const std::function<double(double)>& log_f, double a,
                    double b, int per_decade) {
  const auto xs = log_nodes(a, b, per_decade);
  double acc = -std::numeric_limits<double>::infinity();
  for (size_t k = 0; k + 1 < xs.size(); ++k)
    acc = logsumexp(acc, log_segment(log_f, xs[k], xs[k + 1]));
  return acc;
}

}  // namespace orlicz

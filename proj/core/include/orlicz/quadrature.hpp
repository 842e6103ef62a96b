#pragma once

#include <functional>

#include "orlicz/tabulated.hpp"

namespace orlicz {

/// log(e^a + e^b) without overflow.
double logsumexp(double a, double b);

/// Least-squares slope of x -> log_f(x) over [x_edge, x_edge +/- width]
/// (direction chosen by `leftward`). Used to classify improper endpoints.
struct EdgeSlope {
  double slope = 0;
  double log_value_at_edge = 0;
};
EdgeSlope fit_edge_slope(const std::function<double(double)>& log_f,
                         double x_edge, double width, bool leftward, int n = 17);

/// Margin below/above the critical exponent -1 within which an improper
/// integral is declared divergent (fitted finitely, certified nothing).
inline constexpr double kDivergenceMargin = 1e-3;

struct CumulativeResult {
  LogLogTable F;           // F(t) = integral of f over (0, t], increasing
  double head_exponent;    // fitted slope of log f at the lower edge
  bool head_converges;
  double log_total;        // log F(t_hi)
};

/// Tabulates F(t) = c_head + \int_{t_lo}^{t} f ds entirely in the log domain:
/// `log_f(x)` returns log f(e^x). The head piece integrates the fitted edge
/// power law analytically on (0, t_lo]; divergence (slope <= -1 + margin)
/// throws QuadratureError unless `allow_divergent_head`, in which case the
/// head is dropped and head_converges=false.
CumulativeResult cumulative_from_zero(const std::function<double(double)>& log_f,
                                      double t_lo, double t_hi,
                                      int per_decade = 400,
                                      bool allow_divergent_head = false);

struct TailResult {
  LogLogTable T;          // T(t) = integral of f over [t, infinity), decreasing
  double tail_exponent;   // fitted slope of log f at the upper edge
  bool tail_converges;
  double log_total;       // log T(t_lo)
};

/// Tabulates T(t) = \int_t^{infinity} f ds by backward accumulation plus the
/// analytic power-law tail beyond t_hi. Divergence (slope >= -1 - margin)
/// throws QuadratureError unless `allow_divergent_tail`.
TailResult cumulative_to_infinity(const std::function<double(double)>& log_f,
                                  double t_lo, double t_hi,
                                  int per_decade = 400,
                                  bool allow_divergent_tail = false);

/// log of \int_a^b f dt with log-domain Gauss segments (a, b in t, not log t).
double log_integral(const std::function<double(double)>& log_f, double a,
                    double b, int segments_per_decade = 400);

}  // namespace orlicz

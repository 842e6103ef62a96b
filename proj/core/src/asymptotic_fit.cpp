#include "orlicz/asymptotic_fit.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "orlicz/errors.hpp"

namespace orlicz {

namespace {

struct Solved {
  Eigen::VectorXd beta;
  double rms = 0;
  double max_abs = 0;
};

Solved solve_ls(const Eigen::MatrixXd& M, const Eigen::VectorXd& rhs) {
  Solved s;
  s.beta = M.colPivHouseholderQr().solve(rhs);
  Eigen::VectorXd r = M * s.beta - rhs;
  s.rms = std::sqrt(r.squaredNorm() / static_cast<double>(rhs.size()));
  s.max_abs = r.cwiseAbs().maxCoeff();
  return s;
}

}  // namespace

AsymptoticFit fit_asymptotics(const std::function<double(double)>& log_f,
                              double t_lo, double t_hi, int n,
                              bool fit_loglog) {
  if (!(t_lo > 3.0) || !(t_hi > t_lo * 10.0))
    throw DomainError(
        "asymptotic fit needs t_lo > 3 and at least one decade of window");
  if (n < 16) throw DomainError("asymptotic fit needs at least 16 samples");

  const int cols = fit_loglog ? 4 : 3;
  Eigen::MatrixXd M(n, cols);
  Eigen::VectorXd rhs(n);
  const double x_lo = std::log(t_lo), x_hi = std::log(t_hi);
  for (int i = 0; i < n; ++i) {
    const double x = x_lo + (x_hi - x_lo) * i / (n - 1);
    const double u = std::log(x);
    M(i, 0) = 1.0;
    M(i, 1) = x;
    M(i, 2) = u;
    if (fit_loglog) M(i, 3) = std::log(u);
    rhs(i) = log_f(x);
    if (!std::isfinite(rhs(i)))
      throw DomainError("non-finite value inside asymptotic fit window");
  }
  Solved s = solve_ls(M, rhs);

  AsymptoticFit fit;
  fit.intercept = s.beta(0);
  fit.exponent = s.beta(1);
  fit.log_power = s.beta(2);
  fit.loglog_power = fit_loglog ? s.beta(3) : 0.0;
  fit.residual_rms = s.rms;
  fit.residual_max = s.max_abs;
  fit.window_lo = t_lo;
  fit.window_hi = t_hi;
  return fit;
}

AsymptoticFit fit_asymptotics_scaled(
    const std::function<double(double)>& log_f,
    const std::function<double(double)>& slope, double t_lo, double t_hi,
    const ScaledFitOptions& opt) {
  if (!(t_lo > 3.0) || !(t_hi > t_lo * 10.0))
    throw DomainError(
        "asymptotic fit needs t_lo > 3 and at least one decade of window");
  const int n = opt.samples;
  if (n < 16) throw DomainError("asymptotic fit needs at least 16 samples");
  if (opt.correction_order < 0 || opt.correction_order > 2)
    throw DomainError("correction_order must be 0, 1 or 2");
  if (opt.scale == InnerScale::mapped && !opt.inner_log)
    throw DomainError("mapped scale requires an inner_log callback");

  const double e1 = std::exp(1.0);
  const double ee = std::exp(e1);
  const int cols = 3 + opt.correction_order;
  Eigen::MatrixXd M(n, cols);
  Eigen::VectorXd rhs(n);
  const double x_lo = std::log(t_lo), x_hi = std::log(t_hi);
  for (int i = 0; i < n; ++i) {
    const double x = x_lo + (x_hi - x_lo) * i / (n - 1);
    const double y = log_f(x);
    if (!std::isfinite(y))
      throw DomainError("non-finite value inside asymptotic fit window");
    double w = x;
    if (opt.scale == InnerScale::legendre) {
      const double m = slope(x);
      if (!(m > 0)) throw DomainError("non-positive slope in legendre scale");
      // Legendre argmax t*(s) = d f / d s = slope * f / s.
      w = std::log(m) + y - x;
    } else if (opt.scale == InnerScale::mapped) {
      w = opt.inner_log(x);
    }
    if (!std::isfinite(w) || w <= 0.2)
      throw DomainError("effective argument too small inside fit window");
    const double u = std::exp(w);
    double lcol, g;
    if (opt.family == LogFamily::log) {
      const double L = std::log(e1 + u);
      lcol = std::log(L);
      g = u / ((e1 + u) * L);
    } else {
      const double l1 = std::log(ee + u);
      const double L2 = std::log(l1);
      lcol = std::log(L2);
      g = u / ((ee + u) * l1 * L2);
    }
    M(i, 0) = 1.0;
    M(i, 1) = x;
    M(i, 2) = lcol;
    if (opt.correction_order >= 1) M(i, 3) = g;
    if (opt.correction_order >= 2) M(i, 4) = g * g;
    rhs(i) = y;
  }
  Solved s = solve_ls(M, rhs);

  AsymptoticFit fit;
  fit.intercept = s.beta(0);
  fit.exponent = s.beta(1);
  if (opt.family == LogFamily::log)
    fit.log_power = s.beta(2);
  else
    fit.loglog_power = s.beta(2);
  fit.residual_rms = s.rms;
  fit.residual_max = s.max_abs;
  fit.window_lo = t_lo;
  fit.window_hi = t_hi;
  return fit;
}

InnerExponentFit fit_inner_exponent(const std::function<double(double)>& log_g,
                                    double t_lo, double t_hi, int n) {
  if (!(t_lo > 0) || !(t_hi > t_lo))
    throw DomainError("inner exponent fit needs 0 < t_lo < t_hi");
  if (n < 8) throw DomainError("inner exponent fit needs at least 8 samples");

  const double x_lo = std::log(t_lo), x_hi = std::log(t_hi);
  Eigen::VectorXd rhs(n), xs(n);
  for (int i = 0; i < n; ++i) {
    xs(i) = x_lo + (x_hi - x_lo) * i / (n - 1);
    rhs(i) = log_g(xs(i));
    if (!std::isfinite(rhs(i)))
      throw DomainError("non-finite value inside inner exponent window");
  }
  // Pass 1: y = C + p x.  Later passes add the nuisance shapes
  // (x - x_lo)^j exp(-k p_hat (x - x_lo)): expanding
  // log((a x + g0) + c t^p) around its power part produces exactly these
  // corrections at order k, so neither an additive constant nor a linear
  // term under the outer log biases the exponent.  The decay rate of the
  // corrections is the exponent itself, so iterate p_hat to its fixed
  // point; the k = 2 pair only enters when the window sees enough decay to
  // separate it from the polynomial part.
  InnerExponentFit fit;
  double p_hat = 1.0;
  double p_prev = std::numeric_limits<double>::infinity();
  for (int pass = 0; pass < 9 && std::abs(p_hat - p_prev) > 1e-9; ++pass) {
    const bool second = pass > 0 && p_hat * (x_hi - x_lo) > 2.0;
    const int cols = pass == 0 ? 2 : (second ? 7 : 4);
    Eigen::MatrixXd M(n, cols);
    for (int i = 0; i < n; ++i) {
      M(i, 0) = 1.0;
      M(i, 1) = xs(i);
      if (pass > 0) {
        const double dx = xs(i) - x_lo;
        const double e1 = std::exp(-p_hat * dx);
        M(i, 2) = e1;
        M(i, 3) = dx * e1;
        if (second) {
          M(i, 4) = e1 * e1;
          M(i, 5) = dx * e1 * e1;
          M(i, 6) = dx * dx * e1 * e1;
        }
      }
    }
    Solved s = solve_ls(M, rhs);
    fit.intercept = s.beta(0);
    p_prev = pass == 0 ? std::numeric_limits<double>::infinity() : p_hat;
    fit.exponent = s.beta(1);
    fit.residual_rms = s.rms;
    p_hat = std::clamp(fit.exponent, 0.1, 50.0);
  }
  return fit;
}

ColumnFit fit_columns(const std::vector<double>& y,
                      const std::vector<std::vector<double>>& cols) {
  const int n = static_cast<int>(y.size());
  const int k = static_cast<int>(cols.size());
  if (k == 0 || n < 2 * k)
    throw DomainError("fit_columns needs columns and at least 2x samples");
  Eigen::MatrixXd M(n, k);
  Eigen::VectorXd rhs(n), scale(k);
  for (int i = 0; i < n; ++i) {
    rhs(i) = y[i];
    if (!std::isfinite(rhs(i)))
      throw DomainError("non-finite value inside fit_columns");
  }
  for (int j = 0; j < k; ++j) {
    if (cols[j].size() != y.size())
      throw DomainError("fit_columns: column size mismatch");
    double m = 0;
    for (int i = 0; i < n; ++i) {
      if (!std::isfinite(cols[j][i]))
        throw DomainError("non-finite column inside fit_columns");
      m = std::max(m, std::abs(cols[j][i]));
    }
    scale(j) = m > 0 ? m : 1.0;
    for (int i = 0; i < n; ++i) M(i, j) = cols[j][i] / scale(j);
  }
  Solved s = solve_ls(M, rhs);
  ColumnFit fit;
  fit.coef.resize(k);
  for (int j = 0; j < k; ++j) fit.coef[j] = s.beta(j) / scale(j);
  fit.residual_rms = s.rms;
  fit.residual_max = s.max_abs;
  return fit;
}

}  // namespace orlicz

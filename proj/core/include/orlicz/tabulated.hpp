#pragma once

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

namespace orlicz {

/// What to do when an evaluation leaves the tabulated hull.
enum class HullPolicy {
  strict,  // throw DomainError
  extend,  // continue with the edge power law (linear in log-log)
};

/// Log-spaced grid description used by comparison and fitting routines.
struct LogGrid {
  double lo = 1e-8;
  double hi = 1e8;
  int per_decade = 400;

  std::vector<double> points() const;
  std::vector<double> log_points() const;  // natural logs
};

/// A positive increasing function tabulated as y = log f on x = log t with
/// exact nodal slopes dy/dx, interpolated by a monotone cubic Hermite.
/// All constructions in this library carry exact slopes (closed-form
/// derivatives, Legendre argmax identities, or cumulative-integral
/// integrands), which keeps interpolation error at the 1e-10 level needed by
/// the biconjugation and round-trip checks.
class LogLogTable {
 public:
  LogLogTable() = default;
  LogLogTable(std::vector<double> x, std::vector<double> y,
              std::vector<double> dydx, HullPolicy policy);

  /// Tabulate from a callable giving log f(e^x) and optionally its x-slope.
  static LogLogTable sample(const std::function<double(double)>& log_f,
                            const std::function<double(double)>& slope,
                            double t_lo, double t_hi, int per_decade,
                            HullPolicy policy);

  bool empty() const { return x_.empty(); }
  std::size_t size() const { return x_.size(); }
  HullPolicy policy() const { return policy_; }
  void set_policy(HullPolicy p) { policy_ = p; }

  double x_front() const { return x_.front(); }
  double x_back() const { return x_.back(); }
  double y_front() const { return y_.front(); }
  double y_back() const { return y_.back(); }
  /// Hull in the argument t (not log t).
  std::pair<double, double> hull() const;

  /// y(x) = log f at log-argument x, honoring the hull policy.
  double log_at(double x) const;
  /// dy/dx at log-argument x.
  double slope_at(double x) const;

  double value(double t) const;       // f(t)
  double log_value(double t) const;   // log f(t)
  double derivative(double t) const;  // df/dt

  /// x with y(x) = ylog; requires the table to be increasing.
  double inverse_log(double ylog) const;
  /// t with f(t) = s.
  double inverse(double s) const;

  /// Applies g: y -> a*y + b (f -> e^b * f^a) in place; keeps slopes exact.
  void scale_log(double a, double b);

  const std::vector<double>& xs() const { return x_; }
  const std::vector<double>& ys() const { return y_; }
  const std::vector<double>& slopes() const { return dydx_; }

 private:
  std::size_t segment(double x) const;
  void enforce_monotone();

  std::vector<double> x_, y_, dydx_;
  HullPolicy policy_ = HullPolicy::strict;
};

}  // namespace orlicz

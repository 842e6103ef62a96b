#include "orlicz/tabulated.hpp"

#include <algorithm>
#include <cmath>

#include "orlicz/errors.hpp"

namespace orlicz {

std::vector<double> LogGrid::log_points() const {
  if (!(lo > 0.0) || !(hi > lo)) throw DomainError("LogGrid needs 0 < lo < hi");
  const double xlo = std::log(lo), xhi = std::log(hi);
  const double decades = (xhi - xlo) / std::log(10.0);
  const int n = std::max(2, static_cast<int>(std::ceil(decades * per_decade)) + 1);
  std::vector<double> xs(n);
  for (int i = 0; i < n; ++i) xs[i] = xlo + (xhi - xlo) * i / (n - 1);
  return xs;
}

std::vector<double> LogGrid::points() const {
  auto xs = log_points();
  for (auto& x : xs) x = std::exp(x);
  return xs;
}

LogLogTable::LogLogTable(std::vector<double> x, std::vector<double> y,
                         std::vector<double> dydx, HullPolicy policy)
    : x_(std::move(x)), y_(std::move(y)), dydx_(std::move(dydx)), policy_(policy) {
  if (x_.size() < 2 || x_.size() != y_.size() || x_.size() != dydx_.size())
    throw DomainError("LogLogTable needs >= 2 consistent nodes");
  for (std::size_t i = 1; i < x_.size(); ++i)
    if (!(x_[i] > x_[i - 1])) throw DomainError("LogLogTable abscissae must increase");
  enforce_monotone();
}

LogLogTable LogLogTable::sample(const std::function<double(double)>& log_f,
                                const std::function<double(double)>& slope,
                                double t_lo, double t_hi, int per_decade,
                                HullPolicy policy) {
  LogGrid g{t_lo, t_hi, per_decade};
  auto xs = g.log_points();
  std::vector<double> ys(xs.size()), ds(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    ys[i] = log_f(xs[i]);
    if (slope) {
      ds[i] = slope(xs[i]);
    } else {
      const double h = 5e-6;
      ds[i] = (log_f(xs[i] + h) - log_f(xs[i] - h)) / (2 * h);
    }
    if (!std::isfinite(ys[i]) || !std::isfinite(ds[i]))
      throw DomainError("LogLogTable::sample produced a non-finite node");
  }
  return LogLogTable(std::move(xs), std::move(ys), std::move(ds), policy);
}

void LogLogTable::enforce_monotone() {
  // Fritsch-Carlson style safeguard. With exact slopes on smooth monotone
  // data the clamps are inert; they only bite on repaired or noisy tables.
  const std::size_t n = x_.size();
  bool inc = y_.back() >= y_.front();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double d = (y_[i + 1] - y_[i]) / (x_[i + 1] - x_[i]);
    if (inc) {
      if (d < 0) continue;  // locally flat or non-monotone data: leave as is
      dydx_[i] = std::clamp(dydx_[i], 0.0, 3.0 * d);
      dydx_[i + 1] = std::clamp(dydx_[i + 1], 0.0, 3.0 * d);
    } else {
      if (d > 0) continue;
      dydx_[i] = std::clamp(dydx_[i], 3.0 * d, 0.0);
      dydx_[i + 1] = std::clamp(dydx_[i + 1], 3.0 * d, 0.0);
    }
  }
}

std::pair<double, double> LogLogTable::hull() const {
  return {std::exp(x_.front()), std::exp(x_.back())};
}

std::size_t LogLogTable::segment(double x) const {
  auto it = std::upper_bound(x_.begin(), x_.end(), x);
  std::size_t k = static_cast<std::size_t>(it - x_.begin());
  if (k == 0) return 0;
  if (k >= x_.size()) return x_.size() - 2;
  return k - 1;
}

double LogLogTable::log_at(double x) const {
  if (empty()) throw DomainError("empty LogLogTable");
  if (x < x_.front() || x > x_.back()) {
    if (policy_ == HullPolicy::strict)
      throw DomainError("argument outside tabulated hull");
    if (x < x_.front()) return y_.front() + dydx_.front() * (x - x_.front());
    return y_.back() + dydx_.back() * (x - x_.back());
  }
  const std::size_t k = segment(x);
  const double h = x_[k + 1] - x_[k];
  const double u = (x - x_[k]) / h;
  const double h00 = (1 + 2 * u) * (1 - u) * (1 - u);
  const double h10 = u * (1 - u) * (1 - u);
  const double h01 = u * u * (3 - 2 * u);
  const double h11 = u * u * (u - 1);
  return h00 * y_[k] + h10 * h * dydx_[k] + h01 * y_[k + 1] + h11 * h * dydx_[k + 1];
}

double LogLogTable::slope_at(double x) const {
  if (empty()) throw DomainError("empty LogLogTable");
  if (x < x_.front() || x > x_.back()) {
    if (policy_ == HullPolicy::strict)
      throw DomainError("argument outside tabulated hull");
    return x < x_.front() ? dydx_.front() : dydx_.back();
  }
  const std::size_t k = segment(x);
  const double h = x_[k + 1] - x_[k];
  const double u = (x - x_[k]) / h;
  const double d00 = (6 * u * u - 6 * u) / h;
  const double d10 = 3 * u * u - 4 * u + 1;
  const double d01 = (6 * u - 6 * u * u) / h;
  const double d11 = 3 * u * u - 2 * u;
  return d00 * y_[k] + d10 * dydx_[k] + d01 * y_[k + 1] + d11 * dydx_[k + 1];
}

double LogLogTable::value(double t) const { return std::exp(log_value(t)); }

double LogLogTable::log_value(double t) const {
  if (!(t > 0)) throw DomainError("LogLogTable argument must be positive");
  return log_at(std::log(t));
}

double LogLogTable::derivative(double t) const {
  const double x = std::log(t);
  return slope_at(x) * std::exp(log_at(x) - x);
}

double LogLogTable::inverse_log(double ylog) const {
  if (empty()) throw DomainError("empty LogLogTable");
  if (!(y_.back() > y_.front()))
    throw DomainError("inverse of a non-increasing table");
  if (ylog < y_.front() || ylog > y_.back()) {
    if (policy_ == HullPolicy::strict)
      throw DomainError("value outside tabulated range");
    if (ylog < y_.front()) {
      const double d = std::max(dydx_.front(), 1e-300);
      return x_.front() + (ylog - y_.front()) / d;
    }
    const double d = std::max(dydx_.back(), 1e-300);
    return x_.back() + (ylog - y_.back()) / d;
  }
  // Nodes are increasing after the monotone safeguard, so bracket by node
  // then bisect the cubic inside the segment.
  auto it = std::lower_bound(y_.begin(), y_.end(), ylog);
  std::size_t k = static_cast<std::size_t>(it - y_.begin());
  if (k > 0) --k;
  if (k >= x_.size() - 1) k = x_.size() - 2;
  double a = x_[k], b = x_[k + 1];
  for (int i = 0; i < 80 && (b - a) > 1e-15 * (1 + std::abs(a)); ++i) {
    const double m = 0.5 * (a + b);
    (log_at(m) < ylog ? a : b) = m;
  }
  return 0.5 * (a + b);
}

double LogLogTable::inverse(double s) const {
  if (!(s > 0)) throw DomainError("inverse argument must be positive");
  return std::exp(inverse_log(std::log(s)));
}

void LogLogTable::scale_log(double a, double b) {
  for (std::size_t i = 0; i < y_.size(); ++i) {
    y_[i] = a * y_[i] + b;
    dydx_[i] *= a;
  }
}

}  // namespace orlicz

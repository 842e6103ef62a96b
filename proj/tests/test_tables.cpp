#include <cmath>
#include <functional>
#include <vector>

#include "doctest.h"
#include "orlicz/asymptotic_fit.hpp"
#include "orlicz/errors.hpp"
#include "orlicz/quadrature.hpp"
#include "orlicz/tabulated.hpp"

using namespace orlicz;

namespace {

// Adaptive Simpson in the linear domain; independent cross-check for the
// log-domain quadrature engine.
double simpson(const std::function<double(double)>& f, double a, double b,
               double fa, double fm, double fb, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return simpson(f, a, m, fa, flm, fm, tol / 2, depth - 1) +
         simpson(f, m, b, fm, frm, fb, tol / 2, depth - 1);
}

double integrate_oracle(const std::function<double(double)>& f, double a,
                        double b, double tol = 1e-12) {
  const double m = 0.5 * (a + b);
  return simpson(f, a, b, f(a), f(m), f(b), tol, 48);
}

}  // namespace

TEST_CASE("log-log table reproduces a pure power law exactly") {
  auto log_f = [](double x) { return std::log(3.0) + 2.5 * x; };
  auto slope = [](double) { return 2.5; };
  auto tab = LogLogTable::sample(log_f, slope, 1e-4, 1e4, 80, HullPolicy::strict);

  for (double t : {1.7e-4, 0.03, 1.0, 12.345, 8.6e3}) {
    CHECK(tab.value(t) == doctest::Approx(3.0 * std::pow(t, 2.5)).epsilon(1e-13));
    CHECK(tab.derivative(t) ==
          doctest::Approx(7.5 * std::pow(t, 1.5)).epsilon(1e-12));
    const double s = 3.0 * std::pow(t, 2.5);
    CHECK(tab.inverse(s) == doctest::Approx(t).epsilon(1e-12));
  }
}

TEST_CASE("log-log table interpolation error stays near 1e-11 at 400/decade") {
  // f(t) = t^2 log(e + t): curvature in log-log coordinates, exact slopes.
  auto log_f = [](double x) {
    const double t = std::exp(x);
    return 2.0 * x + std::log(std::log(std::exp(1.0) + t));
  };
  auto slope = [](double x) {
    const double t = std::exp(x);
    const double L = std::log(std::exp(1.0) + t);
    return 2.0 + t / ((std::exp(1.0) + t) * L);
  };
  auto tab = LogLogTable::sample(log_f, slope, 1e-3, 1e3, 400, HullPolicy::strict);

  double worst = 0;
  for (int i = 0; i < 500; ++i) {
    const double t = std::pow(10.0, -3.0 + 6.0 * (i + 0.37) / 500.0);
    const double exact = log_f(std::log(t));
    worst = std::max(worst, std::abs(tab.log_value(t) - exact));
  }
  CHECK(worst < 5e-11);

  // Derivative: exact at nodes, O(h^3) between them.
  double worst_d = 0;
  for (int i = 0; i < 200; ++i) {
    const double t = std::pow(10.0, -2.0 + 4.0 * (i + 0.51) / 200.0);
    const double L = std::log(std::exp(1.0) + t);
    const double exact = 2.0 * t * L + t * t / (std::exp(1.0) + t);
    worst_d = std::max(worst_d, std::abs(tab.derivative(t) / exact - 1.0));
  }
  CHECK(worst_d < 1e-8);
}

TEST_CASE("hull policies: strict throws, extend continues the edge power law") {
  auto log_f = [](double x) { return 2.0 * x; };
  auto slope = [](double) { return 2.0; };
  auto strict = LogLogTable::sample(log_f, slope, 1e-2, 1e2, 50, HullPolicy::strict);
  CHECK_THROWS_AS(strict.value(1e3), DomainError);
  CHECK_THROWS_AS(strict.value(1e-3), DomainError);
  CHECK_THROWS_AS(strict.inverse(1e10), DomainError);

  auto extend = LogLogTable::sample(log_f, slope, 1e-2, 1e2, 50, HullPolicy::extend);
  CHECK(extend.value(1e3) == doctest::Approx(1e6).epsilon(1e-12));
  CHECK(extend.value(1e-3) == doctest::Approx(1e-6).epsilon(1e-12));
  CHECK(extend.inverse(1e8) == doctest::Approx(1e4).epsilon(1e-12));
}

TEST_CASE("monotone safeguard keeps the interpolant increasing") {
  // Deliberately inflated nodal slopes; raw cubic Hermite would overshoot.
  std::vector<double> x, y, d;
  for (int i = 0; i <= 10; ++i) {
    x.push_back(0.3 * i);
    y.push_back(0.1 * i);
    d.push_back(i % 2 == 0 ? 8.0 : 0.0);
  }
  LogLogTable tab(x, y, d, HullPolicy::strict);
  double prev = -1e300;
  for (int i = 0; i <= 900; ++i) {
    const double xx = 0.3 * 10 * i / 900.0;
    const double yy = tab.log_at(xx);
    CHECK(yy >= prev - 1e-13);
    prev = yy;
  }
}

TEST_CASE("scale_log rescales values and keeps slopes consistent") {
  auto log_f = [](double x) { return 1.5 * x; };
  auto slope = [](double) { return 1.5; };
  auto tab = LogLogTable::sample(log_f, slope, 1e-2, 1e2, 50, HullPolicy::strict);
  tab.scale_log(2.0, std::log(5.0));  // f -> 5 f^2 = 5 t^3
  CHECK(tab.value(2.0) == doctest::Approx(40.0).epsilon(1e-12));
  CHECK(tab.derivative(2.0) == doctest::Approx(60.0).epsilon(1e-12));
}

TEST_CASE("cumulative integral of a power law matches the closed form") {
  auto res = cumulative_from_zero([](double x) { return 2.0 * x; }, 1e-6, 1e6, 400);
  CHECK(res.head_exponent == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(res.head_converges);
  for (double t : {1e-4, 0.37, 1.0, 55.0, 9.9e5}) {
    CHECK(res.F.value(t) == doctest::Approx(t * t * t / 3.0).epsilon(1e-10));
    CHECK(res.F.derivative(t) == doctest::Approx(t * t).epsilon(1e-9));
  }
}

TEST_CASE("cumulative integral spots a divergent head") {
  CHECK_THROWS_AS(
      cumulative_from_zero([](double x) { return -x; }, 1e-6, 1e2, 100),
      QuadratureError);
  auto res = cumulative_from_zero([](double x) { return -x; }, 1e-6, 1e2, 100, true);
  CHECK_FALSE(res.head_converges);
  // With the head dropped, F measures the integral from t_lo only.
  const double expected = std::log(1.0 / 1e-6);
  CHECK(res.F.value(1.0) == doctest::Approx(expected).epsilon(1e-8));
}

TEST_CASE("tail integral matches closed form and spots divergence") {
  auto res =
      cumulative_to_infinity([](double x) { return -2.5 * x; }, 1e-2, 1e8, 400);
  CHECK(res.tail_exponent == doctest::Approx(-2.5).epsilon(1e-9));
  for (double t : {0.05, 1.0, 777.0, 1e6}) {
    CHECK(res.T.value(t) ==
          doctest::Approx(std::pow(t, -1.5) / 1.5).epsilon(1e-10));
  }
  CHECK_THROWS_AS(
      cumulative_to_infinity([](double x) { return -x; }, 1e-2, 1e8, 100),
      QuadratureError);
}

TEST_CASE("cumulative integral agrees with an adaptive Simpson oracle") {
  // integrand (t / psi(t))^{1/2} for psi = (1+t)log(1+t) - t; near zero the
  // integrand blows up like (2/t)^{1/2} which Simpson handles via splitting.
  auto psi = [](double t) {
    if (t < 1e-5) return t * t * (0.5 - t / 6.0);
    return (1.0 + t) * std::log1p(t) - t;
  };
  auto f = [&](double t) { return std::sqrt(t / psi(t)); };
  const double oracle = integrate_oracle(f, 1e-12, 1.0) +
                        2.0 * std::sqrt(2.0) * 1e-6;  // power head below 1e-12
  auto res = cumulative_from_zero(
      [&](double x) {
        const double t = std::exp(x);
        return 0.5 * (x - std::log(psi(t)));
      },
      1e-10, 1e2, 400);
  CHECK(res.F.value(1.0) == doctest::Approx(oracle).epsilon(1e-8));
}

TEST_CASE("asymptotic fit recovers exact basis coefficients") {
  auto y = [](double x) {
    const double u = std::log(x);
    return 1.7 + 2.5 * x - 1.5 * u + 0.8 * std::log(u);
  };
  const auto fit = fit_asymptotics(y, 1e3, 1e8);
  CHECK(fit.exponent == doctest::Approx(2.5).epsilon(1e-9));
  CHECK(fit.log_power == doctest::Approx(-1.5).epsilon(1e-8));
  CHECK(fit.loglog_power == doctest::Approx(0.8).epsilon(1e-6));
  CHECK(fit.residual_rms < 1e-10);
}

TEST_CASE("asymptotic fit absorbs fast-decaying perturbations") {
  // f = t^2 (1 + 1/t): the perturbation decays like e^{-x} inside the
  // window, far faster than any basis column varies.
  auto y = [](double x) { return 2.0 * x + std::log1p(std::exp(-x)); };
  const auto fit = fit_asymptotics(y, 1e4, 1e8, 240, /*fit_loglog=*/false);
  CHECK(std::abs(fit.exponent - 2.0) < 1e-4);
  CHECK(std::abs(fit.log_power) < 1e-3);
}

TEST_CASE("scaled fit is exact on closed power-log forms") {
  // f = c t^p L(t)^a with L = log(e+t) is an exact member of the scaled
  // basis in direct mode: {1, x, log L} plus correction columns.
  const double p = 2.5, a = -1.5, lc = 0.4;
  auto log_f = [&](double x) {
    const double t = std::exp(x);
    return lc + p * x + a * std::log(std::log(std::exp(1.0) + t));
  };
  auto slope = [&](double x) {
    const double t = std::exp(x);
    const double L = std::log(std::exp(1.0) + t);
    return p + a * t / ((std::exp(1.0) + t) * L);
  };
  ScaledFitOptions opt;
  const auto fit = fit_asymptotics_scaled(log_f, slope, 1e3, 1e8, opt);
  CHECK(fit.exponent == doctest::Approx(p).epsilon(1e-10));
  CHECK(fit.log_power == doctest::Approx(a).epsilon(1e-9));
  CHECK(fit.residual_max < 1e-10);
}

TEST_CASE("scaled fit is exact on closed power-loglog forms") {
  const double p = 3.0, b = 0.7, ee = std::exp(std::exp(1.0));
  auto log_f = [&](double x) {
    const double t = std::exp(x);
    return 0.1 + p * x + b * std::log(std::log(std::log(ee + t)));
  };
  ScaledFitOptions opt;
  opt.family = LogFamily::loglog;
  const auto fit =
      fit_asymptotics_scaled(log_f, [](double) { return 1.0; }, 1e3, 1e8, opt);
  CHECK(fit.exponent == doctest::Approx(p).epsilon(1e-10));
  CHECK(fit.loglog_power == doctest::Approx(b).epsilon(1e-8));
  CHECK(fit.log_power == 0.0);
}

TEST_CASE("scaled fit with a mapped inner scale recovers coefficients") {
  // f's log factor varies on the scale w(x) = x - 3 - 1.2 log x rather
  // than at x itself; supplying the map makes the basis exact again.
  const double p = 1.8, a = -0.9;
  auto w_of = [](double x) { return x - 3.0 - 1.2 * std::log(x); };
  auto log_f = [&](double x) {
    const double u = std::exp(w_of(x));
    return 2.0 + p * x + a * std::log(std::log(std::exp(1.0) + u));
  };
  ScaledFitOptions opt;
  opt.scale = InnerScale::mapped;
  opt.inner_log = w_of;
  const auto fit =
      fit_asymptotics_scaled(log_f, [](double) { return 1.0; }, 1e3, 1e8, opt);
  CHECK(fit.exponent == doctest::Approx(p).epsilon(1e-9));
  CHECK(fit.log_power == doctest::Approx(a).epsilon(1e-8));
  CHECK(fit.residual_max < 1e-9);
}

TEST_CASE("inner exponent fit handles exponential-regime windows") {
  // g = 0.75 t^3 + 2: the additive constant decays at the rate of the
  // exponent itself, the shape the second pass models.
  auto log_g = [](double x) {
    return std::log(0.75) + 3.0 * x + std::log1p((2.0 / 0.75) * std::exp(-3.0 * x));
  };
  const auto fit = fit_inner_exponent(log_g, 4.0, 14.0);
  CHECK(std::abs(fit.exponent - 3.0) < 1e-3);
}

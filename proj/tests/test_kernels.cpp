// Newtonian kernel derivatives, Calderon-Zygmund checks, discrete
// potential / quasi-potential solves, the Riesz potential, and parity
// reflection across x_d = 0.
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "orlicz/errors.hpp"
#include "orlicz/field.hpp"
#include "orlicz/grid.hpp"
#include "orlicz/kernels.hpp"
#include "orlicz/norms.hpp"
#include "orlicz/potential.hpp"
#include "orlicz/young.hpp"

using namespace orlicz;

namespace {

SampledField random_vector_field(const Grid& g, std::uint64_t seed) {
  SampledField v = make_vector(g);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int a = 0; a < g.dim; ++a) {
    for (std::size_t c = 0; c < g.size(); ++c) {
      if (g.inside[c]) v.value(a, c) = dist(rng);
    }
  }
  return v;
}

double max_abs_inside(const SampledField& f) {
  double m = 0.0;
  for (std::size_t c = 0; c < f.grid.size(); ++c) {
    if (f.grid.inside[c]) m = std::max(m, std::fabs(f.values[c]));
  }
  return m;
}

}  // namespace

TEST_CASE("kernel_grad: closed form, odd symmetry, homogeneity") {
  KernelSpec ks{3, KernelOrder::first_derivative, 1, 1};
  CHECK(kernel_grad(ks, {1.0, 0.0, 0.0}) ==
        doctest::Approx(-1.0 / (4.0 * M_PI)).epsilon(1e-15));

  // Dimension 4: omega_4 = 2 pi^2.
  KernelSpec k4{4, KernelOrder::first_derivative, 1, 1};
  CHECK(kernel_grad(k4, {1.0, 0.0, 0.0, 0.0}) ==
        doctest::Approx(-1.0 / (2.0 * M_PI * M_PI)).epsilon(1e-14));

  std::mt19937_64 rng(1);
  std::normal_distribution<double> gauss(0.0, 1.0);
  KernelSpec kg{3, KernelOrder::first_derivative, 2, 1};
  for (int s = 0; s < 100; ++s) {
    const std::vector<double> z = {gauss(rng), gauss(rng), gauss(rng)};
    const std::vector<double> mz = {-z[0], -z[1], -z[2]};
    const std::vector<double> z2 = {2 * z[0], 2 * z[1], 2 * z[2]};
    const double v = kernel_grad(kg, z);
    CHECK(kernel_grad(kg, mz) == doctest::Approx(-v).epsilon(1e-14));
    // Degree 1-d homogeneity: value at 2z is 2^{-2} of the value at z.
    CHECK(kernel_grad(kg, z2) == doctest::Approx(0.25 * v).epsilon(1e-13));
  }

  CHECK_THROWS_AS(kernel_grad(kg, {0.0, 0.0, 0.0}), SingularityError);
  CHECK_THROWS_AS(kernel_grad({3, KernelOrder::first_derivative, 4, 1},
                              {1.0, 0.0, 0.0}),
                  PreconditionError);
  CHECK_THROWS_AS(kernel_grad({2, KernelOrder::first_derivative, 1, 1},
                              {1.0, 0.0}),
                  PreconditionError);
}

TEST_CASE("kernel_hess: exact homogeneity, zero trace, smoothness constant") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int s = 0; s < 100; ++s) {
    const std::vector<double> z = {gauss(rng), gauss(rng), gauss(rng)};
    for (double lam : {2.0, 10.0}) {
      const std::vector<double> lz = {lam * z[0], lam * z[1], lam * z[2]};
      for (int i = 1; i <= 3; ++i) {
        for (int j = 1; j <= 3; ++j) {
          KernelSpec kh{3, KernelOrder::second_derivative, i, j};
          const double a = kernel_hess(kh, lz);
          const double b = std::pow(lam, -3.0) * kernel_hess(kh, z);
          CHECK(std::fabs(a - b) <= 1e-12 * std::fabs(b));
        }
      }
    }
    double trace = 0.0, scale = 0.0;
    for (int i = 1; i <= 3; ++i) {
      const double kii =
          kernel_hess({3, KernelOrder::second_derivative, i, i}, z);
      trace += kii;
      scale += std::fabs(kii);
    }
    CHECK(std::fabs(trace) <= 1e-12 * std::max(scale, 1e-300));
  }
  CHECK_THROWS_AS(kernel_hess({3, KernelOrder::second_derivative, 1, 2},
                              {0.0, 0.0, 0.0}),
                  SingularityError);

  // CZ smoothness |K(z+h)-K(z)| <= C |h| |z|^{-d-1}: the measured C is
  // finite and stable when the sample doubles (the larger scan contains
  // the smaller one for the same seed).
  KernelSpec kh{3, KernelOrder::second_derivative, 1, 2};
  const SmoothnessScan s1 = kernel_smoothness_constant(kh, 10000, 7);
  const SmoothnessScan s2 = kernel_smoothness_constant(kh, 20000, 7);
  CHECK(std::isfinite(s1.constant));
  CHECK(s1.constant > 0.0);
  CHECK(s2.constant >= s1.constant);
  CHECK(s2.constant <= 1.2 * s1.constant);
}

TEST_CASE("potential: eigenmode oracle, linearity, maximum principle") {
  const int n = 9;
  const Grid g = Grid::cube(n);
  const double h = 1.0 / n;
  const int p = 2;
  const double lam = 3.0 * (2.0 - 2.0 * std::cos(M_PI * p / (n + 1))) / (h * h);
  SampledField mode = make_scalar(g);
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        mode.values[g.index(i, j, k)] =
            std::sin(M_PI * p * (i + 1.0) / (n + 1)) *
            std::sin(M_PI * p * (j + 1.0) / (n + 1)) *
            std::sin(M_PI * p * (k + 1.0) / (n + 1));
      }
    }
  }
  SampledField rhs = mode;
  for (auto& v : rhs.values) v *= lam;
  SolveInfo info;
  const SampledField w = potential(rhs, Eigen::Matrix3d::Identity(), &info);
  CHECK(info.residual <= 1e-10);
  double err = 0.0;
  for (std::size_t c = 0; c < g.size(); ++c) {
    err = std::max(err, std::fabs(w.values[c] - mode.values[c]));
  }
  CHECK(err <= 1e-10);

  // Zero density gives the zero solution.
  CHECK(max_abs_inside(potential(make_scalar(g, 0.0),
                                 Eigen::Matrix3d::Identity())) == 0.0);

  // Linearity.
  const SampledField h1 = random_field(g, 31, -1.0, 1.0);
  const SampledField h2 = random_field(g, 32, -1.0, 1.0);
  SampledField combo = make_scalar(g);
  for (std::size_t c = 0; c < g.size(); ++c) {
    combo.values[c] = 2.0 * h1.values[c] + 3.0 * h2.values[c];
  }
  const SampledField u1 = potential(h1, Eigen::Matrix3d::Identity());
  const SampledField u2 = potential(h2, Eigen::Matrix3d::Identity());
  const SampledField uc = potential(combo, Eigen::Matrix3d::Identity());
  double lin_err = 0.0, lin_scale = 0.0;
  for (std::size_t c = 0; c < g.size(); ++c) {
    lin_err = std::max(lin_err, std::fabs(uc.values[c] - 2.0 * u1.values[c] -
                                          3.0 * u2.values[c]));
    lin_scale = std::max(lin_scale, std::fabs(uc.values[c]));
  }
  CHECK(lin_err <= 1e-9 * std::max(lin_scale, 1.0));

  // Discrete maximum principle: nonnegative density, identity matrix.
  const Grid gb = Grid::ball(17, 1.0);
  const SampledField hp = random_field(gb, 3, 0.0, 1.0);
  const SampledField up = potential(hp, Eigen::Matrix3d::Identity());
  double mn = 0.0;
  for (std::size_t c = 0; c < gb.size(); ++c) {
    if (gb.inside[c]) mn = std::min(mn, up.values[c]);
  }
  CHECK(mn >= -1e-12);

  // Indefinite matrix must be rejected.
  Eigen::Matrix3d bad = Eigen::Matrix3d::Identity();
  bad(1, 1) = -1.0;
  CHECK_THROWS_AS(potential(h1, bad), EllipticityError);

  // Starved iteration budget surfaces as SolverError.
  PotentialOptions tight;
  tight.rel_tol = 1e-15;
  tight.max_iter = 1;
  CHECK_THROWS_AS(potential(h1, Eigen::Matrix3d::Identity(), nullptr, tight),
                  SolverError);
}

TEST_CASE("quasi_potential: gradient data inverts to minus the potential") {
  // G = grad(phi) with phi vanishing on the boundary: -div(grad w) =
  // div(grad phi) has the solution w = -phi; second-order convergence.
  double errs[2] = {0.0, 0.0};
  int level = 0;
  for (int n : {17, 33}) {
    const Grid g = Grid::cube(n);
    SampledField G = make_vector(g);
    const SampledField phi = sample_scalar(g, [](double x, double y, double z) {
      return std::sin(M_PI * x) * std::sin(M_PI * y) * std::sin(M_PI * z);
    });
    for (int k = 0; k < n; ++k) {
      for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
          const auto c = g.center(i, j, k);
          const std::size_t idx = g.index(i, j, k);
          G.value(0, idx) = M_PI * std::cos(M_PI * c[0]) *
                            std::sin(M_PI * c[1]) * std::sin(M_PI * c[2]);
          G.value(1, idx) = M_PI * std::sin(M_PI * c[0]) *
                            std::cos(M_PI * c[1]) * std::sin(M_PI * c[2]);
          G.value(2, idx) = M_PI * std::sin(M_PI * c[0]) *
                            std::sin(M_PI * c[1]) * std::cos(M_PI * c[2]);
        }
      }
    }
    const SampledField q = quasi_potential(G, Eigen::Matrix3d::Identity());
    double err = 0.0;
    for (std::size_t c = 0; c < g.size(); ++c) {
      err = std::max(err, std::fabs(q.values[c] + phi.values[c]));
    }
    errs[level++] = err;
  }
  CHECK(errs[0] <= 5e-3);
  CHECK(errs[1] <= errs[0] / 3.0);  // observed order ~ 2

  const Grid g9 = Grid::cube(9);
  CHECK(max_abs_inside(quasi_potential(make_vector(g9),
                                       Eigen::Matrix3d::Identity())) == 0.0);
  CHECK_THROWS_AS(quasi_potential(make_scalar(g9), Eigen::Matrix3d::Identity()),
                  PreconditionError);
}

TEST_CASE("riesz potential: ball value, positivity, shift covariance") {
  // I_2 of the unit-ball indicator at the center: 4 pi int_0^1 r dr = 2 pi.
  const Grid g = Grid::ball(25, 1.0);
  SampledField f = make_scalar(g);
  for (std::size_t c = 0; c < g.size(); ++c) {
    if (g.inside[c]) f.values[c] = 1.0;
  }
  const SampledField I2 = riesz_potential(f, 2.0);
  const double center = I2.values[g.index(12, 12, 12)];
  CHECK(std::fabs(center - 2.0 * M_PI) <= 0.01 * 2.0 * M_PI);
  double mn = 1e300;
  for (std::size_t c = 0; c < g.size(); ++c) {
    if (g.inside[c]) mn = std::min(mn, I2.values[c]);
  }
  CHECK(mn >= 0.0);

  // Interior translation covariance: shifting the source by one cell
  // shifts the potential by one cell.
  const Grid gc = Grid::cube(13);
  SampledField blob = make_scalar(gc);
  SampledField blob_shift = make_scalar(gc);
  for (int k = 4; k <= 6; ++k) {
    for (int j = 4; j <= 6; ++j) {
      for (int i = 4; i <= 6; ++i) {
        const double v = 1.0 + i + 2 * j - k;
        blob.values[gc.index(i, j, k)] = v;
        blob_shift.values[gc.index(i + 1, j, k)] = v;
      }
    }
  }
  const SampledField Ia = riesz_potential(blob, 1.5);
  const SampledField Ib = riesz_potential(blob_shift, 1.5);
  double worst = 0.0;
  for (int k = 2; k <= 9; ++k) {
    for (int j = 2; j <= 9; ++j) {
      for (int i = 2; i <= 9; ++i) {
        worst = std::max(worst, std::fabs(Ib.values[gc.index(i + 1, j, k)] -
                                          Ia.values[gc.index(i, j, k)]));
      }
    }
  }
  CHECK(worst <= 1e-12);

  CHECK_THROWS_AS(riesz_potential(blob, 0.0), PreconditionError);
  CHECK_THROWS_AS(riesz_potential(blob, 3.0), PreconditionError);
}

TEST_CASE("reflect_extend: parity values, symmetry, alignment guard") {
  const Grid hg = Grid::half_ball(8, 1.0);
  SampledField c5 = make_scalar(hg);
  for (std::size_t idx = 0; idx < hg.size(); ++idx) {
    if (hg.inside[idx]) c5.values[idx] = 5.0;
  }
  const SampledField odd = reflect_extend(c5, Parity::odd);
  const SampledField even = reflect_extend(c5, Parity::even);
  // Lower half carries the sign-flipped / copied constant.
  CHECK(odd.values[odd.grid.index(4, 4, 1)] == -5.0);
  CHECK(even.values[even.grid.index(4, 4, 1)] == 5.0);
  CHECK(odd.grid.inside[odd.grid.index(4, 4, 1)] == 1);

  // Even extension is mirror-symmetric, odd is antisymmetric, for random
  // data: f~(x', -x_3) = +/- f~(x', x_3) exactly.
  const SampledField r = random_field(hg, 9, -1.0, 1.0);
  const SampledField re = reflect_extend(r, Parity::even);
  const SampledField ro = reflect_extend(r, Parity::odd);
  const int n = hg.extents[2];
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        const int km = n - 1 - k;
        CHECK(re.values[re.grid.index(i, j, k)] ==
              re.values[re.grid.index(i, j, km)]);
        CHECK(ro.values[ro.grid.index(i, j, k)] ==
              -ro.values[ro.grid.index(i, j, km)]);
      }
    }
  }

  // Odd cell count: the plane x_3 = 0 is a cell center row, not an
  // interface.
  CHECK_THROWS_AS(Grid::half_ball(9, 1.0), GridError);
  const Grid godd = Grid::ball(9, 1.0);
  SampledField fodd = make_scalar(godd);
  for (std::size_t idx = 0; idx < godd.size(); ++idx) {
    if (godd.inside[idx]) fodd.values[idx] = 1.0;
  }
  CHECK_THROWS_AS(reflect_extend(fodd, Parity::odd), AlignmentError);

  // Support on the lower half is rejected.
  const Grid gfull = Grid::ball(8, 1.0);
  SampledField flow = make_scalar(gfull);
  for (std::size_t idx = 0; idx < gfull.size(); ++idx) {
    if (gfull.inside[idx]) flow.values[idx] = 1.0;
  }
  CHECK_THROWS_AS(reflect_extend(flow, Parity::odd), PreconditionError);
}

TEST_CASE("odd-extended potential vanishes on the interface to first order") {
  // P[odd h] is exactly odd by symmetry, so its trace at the interface is
  // zero; cell centers sit h/2 away, giving first-order row values.
  double prev = 0.0;
  int level = 0;
  for (int n : {12, 24, 48}) {
    const Grid hg = Grid::half_ball(n, 1.0);
    const SampledField h = random_field(hg, 11, 0.5, 1.5);
    const SampledField ext = reflect_extend(h, Parity::odd);
    const SampledField u = potential(ext, Eigen::Matrix3d::Identity());
    double interface_max = 0.0, overall = 0.0;
    for (int k = 0; k < n; ++k) {
      for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
          if (!ext.grid.inside[ext.grid.index(i, j, k)]) continue;
          const double v = std::fabs(u.values[ext.grid.index(i, j, k)]);
          overall = std::max(overall, v);
          if (k == n / 2) interface_max = std::max(interface_max, v);
        }
      }
    }
    CHECK(interface_max < overall);  // trace row is small, not generic
    if (level > 0) CHECK(interface_max <= prev / 1.6);  // ~ halves per level
    prev = interface_max;
    ++level;
  }
}

TEST_CASE("second differences of the potential are psi-bounded by the data") {
  // W^{2,psi} surrogate: ||D2 P[h]||_psi <= C ||h||_psi with C stable
  // under refinement.
  for (double pw : {2.0, 4.0}) {
    const YoungFunction psi = YoungFunction::power(pw);
    double cs[2] = {0.0, 0.0};
    int level = 0;
    for (int n : {9, 17}) {
      const Grid g = Grid::cube(n);
      double cmax = 0.0;
      for (int s = 0; s < 5; ++s) {
        const SampledField h = random_field(g, 500 + s, -1.0, 1.0);
        const SampledField u = potential(h, Eigen::Matrix3d::Identity());
        cmax = std::max(cmax, luxemburg_norm(second_differences(u), psi) /
                                  luxemburg_norm(h, psi));
      }
      cs[level++] = cmax;
    }
    CHECK(cs[0] > 0.0);
    CHECK(cs[1] <= 2.0 * cs[0]);
    CHECK(cs[1] >= 0.5 * cs[0]);
  }
}

TEST_CASE("quasi-potential scaled-norm bound has r-stable constant") {
  // || Q[G] ||_{scaled, r} <= C ||G||_psi with the measured C varying by
  // at most a factor 2 across r; independent draws per radius.
  for (double pw : {2.0, 4.0}) {
    const YoungFunction psi = YoungFunction::power(pw);
    double cmin = 1e300, cmax = 0.0;
    int rix = 0;
    for (double r : {0.4, 0.2, 0.1}) {
      const Grid g = Grid::ball(17, 2.0 * r);
      double c_r = 0.0;
      for (int s = 0; s < 4; ++s) {
        const SampledField G = random_vector_field(g, 700 + 10 * rix + s);
        const SampledField q = quasi_potential(G, Eigen::Matrix3d::Identity());
        c_r = std::max(c_r, scaled_ball_norm(q, psi, r).value() /
                                luxemburg_norm(G, psi));
      }
      cmin = std::min(cmin, c_r);
      cmax = std::max(cmax, c_r);
      ++rix;
    }
    CHECK(cmax / cmin <= 2.0);
    CHECK(cmax < 10.0);
  }
}

#include "orlicz/potential.hpp"

#include <Eigen/Sparse>
#include <cmath>
#include <string>
#include <vector>

#include "orlicz/errors.hpp"
#include "orlicz/kernels.hpp"
#include "stencil_detail.hpp"

namespace orlicz {

namespace {

SampledField solve_dirichlet(const Grid& g, const Eigen::Matrix3d& A0,
                             const Eigen::VectorXd& b, SolveInfo* info,
                             const PotentialOptions& opt) {
  double m = 0.0, M = 0.0;
  const Eigen::Matrix3d As = detail::symmetric_part(A0, g.dim, &m, &M);
  if (info) {
    info->m = m;
    info->M = M;
  }
  const detail::EquationMap map = detail::equation_map(g);
  Eigen::SparseMatrix<double> K;
  {
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(map.cells.size() * 15);
    detail::constant_stencil(g, map, As, trips);
    const auto n = static_cast<Eigen::Index>(map.cells.size());
    K.resize(n, n);
    K.setFromTriplets(trips.begin(), trips.end());
  }

  Eigen::ConjugateGradient<Eigen::SparseMatrix<double>,
                           Eigen::Lower | Eigen::Upper>
      cg;
  cg.setTolerance(opt.rel_tol);
  cg.setMaxIterations(opt.max_iter);
  cg.compute(K);
  Eigen::VectorXd x = cg.solve(b);
  if (info) {
    info->iterations = static_cast<int>(cg.iterations());
    info->residual = cg.error();
  }
  if (cg.info() != Eigen::Success) {
    throw SolverError("potential solve did not converge (residual " +
                      std::to_string(cg.error()) + ")");
  }
  SampledField w = make_scalar(g);
  for (std::size_t row = 0; row < map.cells.size(); ++row) {
    w.values[map.cells[row]] = x(static_cast<Eigen::Index>(row));
  }
  return w;
}

}  // namespace

SampledField potential(const SampledField& h, const Eigen::Matrix3d& A0,
                       SolveInfo* info, const PotentialOptions& opt) {
  h.validate();
  if (h.components != 1) {
    throw PreconditionError("potential expects a scalar density");
  }
  const Grid& g = h.grid;
  std::vector<std::size_t> cells;
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    if (g.inside[idx]) cells.push_back(idx);
  }
  Eigen::VectorXd b(static_cast<Eigen::Index>(cells.size()));
  for (std::size_t row = 0; row < cells.size(); ++row) {
    b(static_cast<Eigen::Index>(row)) = h.values[cells[row]];
  }
  return solve_dirichlet(g, A0, b, info, opt);
}

SampledField quasi_potential(const SampledField& G, const Eigen::Matrix3d& A0,
                             SolveInfo* info, const PotentialOptions& opt) {
  G.validate();
  const Grid& g = G.grid;
  if (G.components != g.dim) {
    throw PreconditionError("quasi_potential expects a vector field");
  }
  // div G by centered differences with G zero-extended outside the mask.
  auto comp = [&](int a, int i, int j, int k) -> double {
    if (!g.is_inside(i, j, k)) return 0.0;
    return G.value(a, g.index(i, j, k));
  };
  std::vector<std::size_t> cells;
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    if (g.inside[idx]) cells.push_back(idx);
  }
  Eigen::VectorXd b(static_cast<Eigen::Index>(cells.size()));
  for (std::size_t row = 0; row < cells.size(); ++row) {
    const std::size_t idx = cells[row];
    const int i = static_cast<int>(idx % g.extents[0]);
    const int j = static_cast<int>((idx / g.extents[0]) % g.extents[1]);
    const int k = static_cast<int>(idx / (static_cast<std::size_t>(g.extents[0]) * g.extents[1]));
    double div = 0.0;
    for (int a = 0; a < g.dim; ++a) {
      int d[3] = {0, 0, 0};
      d[a] = 1;
      div += (comp(a, i + d[0], j + d[1], k + d[2]) -
              comp(a, i - d[0], j - d[1], k - d[2])) /
             (2.0 * g.spacing[a]);
    }
    b(static_cast<Eigen::Index>(row)) = div;
  }
  return solve_dirichlet(g, A0, b, info, opt);
}

SampledField riesz_potential(const SampledField& f, double alpha) {
  f.validate();
  if (f.components != 1) {
    throw PreconditionError("riesz_potential expects a scalar field");
  }
  const Grid& g = f.grid;
  const int d = g.dim;
  if (!(alpha > 0.0) || !(alpha < d)) {
    throw PreconditionError("riesz_potential needs alpha in (0, dim)");
  }
  const double h = g.spacing[0];
  for (int a = 1; a < d; ++a) {
    if (std::fabs(g.spacing[a] - h) > 1e-12 * h) {
      throw PreconditionError(
          "riesz_potential needs equal spacing on active axes");
    }
  }
  const double omega_d = 2.0 * std::pow(M_PI, 0.5 * d) / std::tgamma(0.5 * d);
  const double vol = g.cell_volume();
  // Exact integral of |y|^{alpha-d} over the inscribed ball, plus a
  // midpoint-rule remainder for the corner shell.
  const double ball_vol =
      std::pow(M_PI, 0.5 * d) / std::tgamma(0.5 * d + 1.0) * std::pow(0.5 * h, d);
  const double r_rep = 0.25 * h * (1.0 + std::sqrt(static_cast<double>(d)));
  const double self_weight = omega_d * std::pow(0.5 * h, alpha) / alpha +
                             (vol - ball_vol) * std::pow(r_rep, alpha - d);

  struct Source {
    double x[3];
    double value;
    std::size_t idx;
  };
  std::vector<Source> sources;
  for (int k = 0; k < g.extents[2]; ++k) {
    for (int j = 0; j < g.extents[1]; ++j) {
      for (int i = 0; i < g.extents[0]; ++i) {
        const std::size_t idx = g.index(i, j, k);
        if (!g.inside[idx] || f.values[idx] == 0.0) continue;
        const auto c = g.center(i, j, k);
        sources.push_back({{c[0], c[1], c[2]}, f.values[idx], idx});
      }
    }
  }

  SampledField out = make_scalar(g);
  const double expo = 0.5 * (alpha - d);  // applied to squared distance
  for (int k = 0; k < g.extents[2]; ++k) {
    for (int j = 0; j < g.extents[1]; ++j) {
      for (int i = 0; i < g.extents[0]; ++i) {
        const std::size_t idx = g.index(i, j, k);
        if (!g.inside[idx]) continue;
        const auto c = g.center(i, j, k);
        double acc = 0.0;
        for (const Source& s : sources) {
          if (s.idx == idx) {
            acc += s.value * self_weight / vol;
            continue;
          }
          double r2 = 0.0;
          for (int a = 0; a < d; ++a) {
            const double dz = c[a] - s.x[a];
            r2 += dz * dz;
          }
          acc += s.value * std::pow(r2, expo);
        }
        out.values[idx] = acc * vol;
      }
    }
  }
  return out;
}

SampledField reflect_extend(const SampledField& f, Parity parity) {
  f.validate();
  const Grid& g = f.grid;
  const int axis = g.dim - 1;
  const double h = g.spacing[axis];
  // The hyperplane x_axis = 0 must be a cell interface with cells on both
  // sides.
  const double t = -g.origin[axis] / h;
  const double t0 = std::round(t);
  if (std::fabs(t - t0) > 1e-9 || t0 < 1.0 || t0 > g.extents[axis] - 1.0) {
    throw AlignmentError(
        "reflection plane x_d = 0 is not an interior cell interface");
  }
  const int kmid = static_cast<int>(t0);

  SampledField out = f;
  const double sign = (parity == Parity::odd) ? -1.0 : 1.0;
  for (int k = 0; k < g.extents[2]; ++k) {
    for (int j = 0; j < g.extents[1]; ++j) {
      for (int i = 0; i < g.extents[0]; ++i) {
        int c[3] = {i, j, k};
        const std::size_t idx = g.index(i, j, k);
        if (c[axis] < kmid) {
          if (g.inside[idx]) {
            throw PreconditionError(
                "reflect_extend input must be supported on the upper half");
          }
          continue;
        }
        if (!g.inside[idx]) continue;
        int m[3] = {i, j, k};
        m[axis] = 2 * kmid - 1 - c[axis];
        if (m[axis] < 0) continue;  // mirror falls outside the box
        const std::size_t midx = g.index(m[0], m[1], m[2]);
        out.grid.inside[midx] = 1;
        // Componentwise parity: f~(x) = sign * f(Rx).
        for (int comp = 0; comp < f.components; ++comp) {
          out.value(comp, midx) = sign * f.value(comp, idx);
        }
      }
    }
  }
  return out;
}

SampledField second_differences(const SampledField& u) {
  u.validate();
  if (u.components != 1) {
    throw PreconditionError("second_differences expects a scalar field");
  }
  const Grid& g = u.grid;
  SampledField out = make_scalar(g);
  auto val = [&](int i, int j, int k) -> double {
    if (!g.is_inside(i, j, k)) return 0.0;
    return u.values[g.index(i, j, k)];
  };
  for (int k = 0; k < g.extents[2]; ++k) {
    for (int j = 0; j < g.extents[1]; ++j) {
      for (int i = 0; i < g.extents[0]; ++i) {
        const std::size_t idx = g.index(i, j, k);
        if (!g.inside[idx]) continue;
        double s = 0.0;
        for (int a = 0; a < g.dim; ++a) {
          int d[3] = {0, 0, 0};
          d[a] = 1;
          const double dd = (val(i + d[0], j + d[1], k + d[2]) -
                             2.0 * u.values[idx] +
                             val(i - d[0], j - d[1], k - d[2])) /
                            (g.spacing[a] * g.spacing[a]);
          s += dd * dd;
        }
        out.values[idx] = std::sqrt(s);
      }
    }
  }
  return out;
}

}  // namespace orlicz

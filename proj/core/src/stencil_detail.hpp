#pragma once

// Internal helpers shared by the constant-coefficient potential solvers and
// the localized elliptic assembly: equation numbering over inside cells, the
// zero-ghost stencil of -div(As grad .), and the symmetrization of a
// constant coefficient matrix.  The localized fixed-point machinery must use
// exactly the same discrete operator as the potential solves, so this code
// lives in one place.

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cstddef>
#include <string>
#include <vector>

#include "orlicz/errors.hpp"
#include "orlicz/grid.hpp"

namespace orlicz::detail {

struct EquationMap {
  std::vector<std::ptrdiff_t> eq;  // cell -> equation index, -1 outside
  std::vector<std::size_t> cells;  // equation index -> cell
};

inline EquationMap equation_map(const Grid& g) {
  EquationMap m;
  m.eq.assign(g.size(), -1);
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    if (g.inside[idx]) {
      m.eq[idx] = static_cast<std::ptrdiff_t>(m.cells.size());
      m.cells.push_back(idx);
    }
  }
  return m;
}

inline void cell_coords(const Grid& g, std::size_t idx, int c[3]) {
  c[0] = static_cast<int>(idx % g.extents[0]);
  c[1] = static_cast<int>((idx / g.extents[0]) % g.extents[1]);
  c[2] = static_cast<int>(
      idx / (static_cast<std::size_t>(g.extents[0]) * g.extents[1]));
}

/// Symmetric part of a constant coefficient matrix, padded with the identity
/// on inactive axes; throws EllipticityError when it is not positive
/// definite.  Optionally records the extreme eigenvalues.
inline Eigen::Matrix3d symmetric_part(const Eigen::Matrix3d& A0, int dim,
                                      double* m_out = nullptr,
                                      double* M_out = nullptr) {
  Eigen::Matrix3d As = 0.5 * (A0 + A0.transpose());
  for (int a = dim; a < 3; ++a) {
    As.row(a).setZero();
    As.col(a).setZero();
    As(a, a) = 1.0;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(As);
  const double m = es.eigenvalues().minCoeff();
  const double M = es.eigenvalues().maxCoeff();
  if (m_out) *m_out = m;
  if (M_out) *M_out = M;
  if (!(m > 0.0)) {
    throw EllipticityError(
        "symmetric part of A0 is not positive definite (min eigenvalue " +
        std::to_string(m) + ")");
  }
  return As;
}

/// Appends the triplets of -div(As grad .) over the inside cells with zero
/// ghost values: centered second differences on the diagonal and symmetric
/// mixed differences off the diagonal.
inline void constant_stencil(const Grid& g, const EquationMap& m,
                             const Eigen::Matrix3d& As,
                             std::vector<Eigen::Triplet<double>>& trips) {
  for (std::size_t row = 0; row < m.cells.size(); ++row) {
    const std::size_t idx = m.cells[row];
    int c[3];
    cell_coords(g, idx, c);

    double diag = 0.0;
    for (int a = 0; a < g.dim; ++a) {
      diag += 2.0 * As(a, a) / (g.spacing[a] * g.spacing[a]);
    }
    trips.emplace_back(static_cast<Eigen::Index>(row),
                       static_cast<Eigen::Index>(row), diag);

    auto add = [&](int di, int dj, int dk, double coef) {
      const int ni = c[0] + di, nj = c[1] + dj, nk = c[2] + dk;
      if (!g.is_inside(ni, nj, nk)) return;  // zero Dirichlet ghost
      trips.emplace_back(static_cast<Eigen::Index>(row),
                         static_cast<Eigen::Index>(m.eq[g.index(ni, nj, nk)]),
                         coef);
    };

    for (int a = 0; a < g.dim; ++a) {
      const double ca = -As(a, a) / (g.spacing[a] * g.spacing[a]);
      int d[3] = {0, 0, 0};
      d[a] = 1;
      add(d[0], d[1], d[2], ca);
      add(-d[0], -d[1], -d[2], ca);
    }
    for (int a = 0; a < g.dim; ++a) {
      for (int b = a + 1; b < g.dim; ++b) {
        const double cab = -As(a, b) / (2.0 * g.spacing[a] * g.spacing[b]);
        if (cab == 0.0) continue;
        for (int sa : {-1, 1}) {
          for (int sb : {-1, 1}) {
            int d[3] = {0, 0, 0};
            d[a] = sa;
            d[b] = sb;
            add(d[0], d[1], d[2], cab * sa * sb);
          }
        }
      }
    }
  }
}

}  // namespace orlicz::detail

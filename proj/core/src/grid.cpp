#include "orlicz/grid.hpp"

#include <cmath>
#include <string>

#include "orlicz/errors.hpp"

namespace orlicz {

Grid Grid::cube(int n, double length, int dim) {
  if (n < 1 || length <= 0.0 || (dim != 2 && dim != 3)) {
    throw GridError("cube grid requires n >= 1, length > 0, dim in {2,3}");
  }
  Grid g;
  g.dim = dim;
  const double h = length / n;
  for (int a = 0; a < 3; ++a) {
    const bool active = a < dim;
    g.extents[a] = active ? n : 1;
    g.spacing[a] = active ? h : 1.0;
    g.origin[a] = 0.0;
  }
  g.inside.assign(g.size(), 1);
  return g;
}

Grid Grid::ball(int n, double radius, int dim) {
  if (n < 1 || radius <= 0.0 || (dim != 2 && dim != 3)) {
    throw GridError("ball grid requires n >= 1, radius > 0, dim in {2,3}");
  }
  Grid g;
  g.dim = dim;
  const double h = 2.0 * radius / n;
  for (int a = 0; a < 3; ++a) {
    const bool active = a < dim;
    g.extents[a] = active ? n : 1;
    g.spacing[a] = active ? h : 1.0;
    g.origin[a] = active ? -radius : 0.0;
  }
  g.inside.assign(g.size(), 0);
  const double r2 = radius * radius;
  for (int k = 0; k < g.extents[2]; ++k) {
    for (int j = 0; j < g.extents[1]; ++j) {
      for (int i = 0; i < g.extents[0]; ++i) {
        const auto c = g.center(i, j, k);
        double d2 = c[0] * c[0] + c[1] * c[1];
        if (dim == 3) d2 += c[2] * c[2];
        if (d2 < r2) g.inside[g.index(i, j, k)] = 1;
      }
    }
  }
  return g;
}

Grid Grid::half_ball(int n, double radius, int dim) {
  if (n % 2 != 0) {
    throw GridError(
        "half_ball grid needs an even cell count so the reflection plane "
        "is a cell interface");
  }
  Grid g = Grid::ball(n, radius, dim);
  const int axis = dim - 1;
  for (int k = 0; k < g.extents[2]; ++k) {
    for (int j = 0; j < g.extents[1]; ++j) {
      for (int i = 0; i < g.extents[0]; ++i) {
        const int along = (axis == 0) ? i : (axis == 1) ? j : k;
        if (along < n / 2) g.inside[g.index(i, j, k)] = 0;
      }
    }
  }
  return g;
}

bool Grid::is_inside(int i, int j, int k) const {
  if (i < 0 || j < 0 || k < 0 || i >= extents[0] || j >= extents[1] ||
      k >= extents[2]) {
    return false;
  }
  return inside[index(i, j, k)] != 0;
}

std::array<double, 3> Grid::center(int i, int j, int k) const {
  return {origin[0] + (i + 0.5) * spacing[0],
          origin[1] + (j + 0.5) * spacing[1],
          origin[2] + (k + 0.5) * spacing[2]};
}

double Grid::cell_volume() const {
  double v = 1.0;
  for (int a = 0; a < dim; ++a) v *= spacing[a];
  return v;
}

double Grid::measure() const {
  std::size_t count = 0;
  for (auto flag : inside) count += (flag != 0);
  return static_cast<double>(count) * cell_volume();
}

void Grid::validate() const {
  if (dim != 2 && dim != 3) {
    throw GridError("grid dim must be 2 or 3, got " + std::to_string(dim));
  }
  for (int a = 0; a < 3; ++a) {
    if (extents[a] < 1) throw GridError("grid extents must be >= 1");
    if (!(spacing[a] > 0.0) || !std::isfinite(spacing[a])) {
      throw GridError("grid spacing must be positive and finite");
    }
  }
  if (dim == 2 && extents[2] != 1) {
    throw GridError("2-d grids must have a single cell along the third axis");
  }
  if (inside.size() != size()) {
    throw GridError("mask length does not match cell count");
  }
}

}  // namespace orlicz

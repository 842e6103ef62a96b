#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace orlicz {

/// Uniform Cartesian cell grid with an inside/outside mask.  Cell (i,j,k)
/// occupies origin + [i h1,(i+1) h1] x ... and is represented by its
/// center.  dim = 2 is allowed for smoke tests (the third axis collapses
/// to one cell of unit spacing).
struct Grid {
  int dim = 3;
  std::array<int, 3> extents{1, 1, 1};
  std::array<double, 3> spacing{1.0, 1.0, 1.0};
  std::array<double, 3> origin{0.0, 0.0, 0.0};
  std::vector<std::uint8_t> inside;  // one flag per cell, x fastest

  /// Axis-aligned cube [0, length]^dim with n cells per axis, all inside.
  static Grid cube(int n, double length = 1.0, int dim = 3);

  /// Ball of the given radius centered at the origin, masked radially on
  /// the bounding box [-radius, radius]^dim with n cells per axis: a cell
  /// is inside iff its center is.
  static Grid ball(int n, double radius, int dim = 3);

  /// Upper half ball {|x| < radius, x_dim > 0} on the same bounding box;
  /// n must be even so the hyperplane x_dim = 0 is a cell interface.
  static Grid half_ball(int n, double radius, int dim = 3);

  std::size_t size() const {
    return static_cast<std::size_t>(extents[0]) * extents[1] * extents[2];
  }
  std::size_t index(int i, int j, int k) const {
    return static_cast<std::size_t>(i) +
           extents[0] * (static_cast<std::size_t>(j) + extents[1] *
                         static_cast<std::size_t>(k));
  }
  /// False for out-of-range indices, so stencil code can probe freely.
  bool is_inside(int i, int j, int k) const;

  std::array<double, 3> center(int i, int j, int k) const;
  double cell_volume() const;
  /// Total measure of the masked region: inside count x cell volume.
  double measure() const;

  /// Checks the structural invariants (positive spacing, mask length,
  /// dim in {2,3}); throws GridError.
  void validate() const;

  bool operator==(const Grid&) const = default;
};

}  // namespace orlicz

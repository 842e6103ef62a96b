#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "orlicz/grid.hpp"

namespace orlicz {

/// How a field is understood to continue across the mask boundary.  The
/// field itself only stores interior samples; consumers (potentials,
/// difference stencils with ghost cells) interpret the convention.
enum class BoundaryConvention : std::int32_t {
  zero_extension = 0,
  reflected_odd = 1,
  reflected_even = 2,
};

/// Scalar or vector field sampled at cell centers.  Vector fields store
/// one planar block per component: values[c * grid.size() + cell].
struct SampledField {
  Grid grid;
  int components = 1;
  BoundaryConvention boundary = BoundaryConvention::zero_extension;
  std::vector<double> values;

  double value(int c, std::size_t cell) const {
    return values[static_cast<std::size_t>(c) * grid.size() + cell];
  }
  double& value(int c, std::size_t cell) {
    return values[static_cast<std::size_t>(c) * grid.size() + cell];
  }
  /// Pointwise Euclidean magnitude across components.
  double magnitude(std::size_t cell) const;

  /// Checks invariants (components in {1, dim}, finite values, size
  /// match); throws GridError on mismatch, DomainError on non-finite.
  void validate() const;

  bool operator==(const SampledField&) const = default;
};

SampledField make_scalar(const Grid& g, double fill = 0.0);
SampledField make_vector(const Grid& g);

/// Samples fn at the centers of inside cells; outside cells get 0.
SampledField sample_scalar(const Grid& g,
                           const std::function<double(double, double, double)>& fn);

/// Uniform i.i.d. values on [lo, hi] over inside cells, deterministic in
/// the seed.
SampledField random_field(const Grid& g, std::uint64_t seed, double lo = -1.0,
                          double hi = 1.0);

struct DerivativeStats {
  int first_order_cells = 0;      // fell back to a one-sided first-order
                                  // difference (two-cell mask chords)
  int zero_information_cells = 0; // single-cell mask chords: no variation
                                  // is observable, derivative set to 0
};

/// Partial derivative along `axis` of a scalar field, sampled on the same
/// grid.  Inside cells with both axis neighbors inside use the
/// second-order centered stencil; cells at the mask boundary use the
/// one-sided second-order stencil when two inside neighbors exist on one
/// side.  Ragged-mask chords of two cells fall back to first order and
/// single-cell chords to a zero derivative (both recorded in stats);
/// ghost values would break constant fields, so none are invented.
/// Throws GridError when the axis extent is < 3 or the axis is inactive.
SampledField derivative(const SampledField& f, int axis,
                        DerivativeStats* stats = nullptr);

/// Text round trip: header lines (dim, extents, spacing, origin, mask,
/// ...) followed by one line per cell; values are written as hexadecimal
/// floating point so the round trip is bit exact.
void write_field_csv(const SampledField& f, const std::string& path);
SampledField read_field_csv(const std::string& path);

/// Raw binary round trip with the same header fields; bit exact.
void write_field_binary(const SampledField& f, const std::string& path);
SampledField read_field_binary(const std::string& path);

}  // namespace orlicz

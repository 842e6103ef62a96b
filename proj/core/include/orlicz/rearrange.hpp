#pragma once

#include <cstddef>
#include <vector>

#include "orlicz/field.hpp"

namespace orlicz {

/// Decreasing rearrangement of a sampled field, as a right-continuous
/// nonincreasing step function on (0, measure]: value_at(s) = values[k]
/// for s in (breakpoints[k-1], breakpoints[k]].
struct RearrangedProfile {
  std::vector<double> breakpoints;  // strictly increasing, last = measure
  std::vector<double> values;       // nonincreasing, values[k] >= 0

  double measure() const { return breakpoints.empty() ? 0.0 : breakpoints.back(); }
  double value_at(double s) const;
  /// Measure of the level set {f* > level}.
  double level_measure(double level) const;

  /// Checks monotonicity invariants; throws DomainError.
  void validate() const;
};

/// Sorts |f| (pointwise magnitude for vector fields) over inside cells in
/// decreasing order, each step carrying one cell volume of measure.
/// Adjacent equal values are merged into a single step.
RearrangedProfile rearrange(const SampledField& f);

}  // namespace orlicz

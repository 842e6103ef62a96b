#include "orlicz/rearrange.hpp"

#include <algorithm>
#include <cmath>

#include "orlicz/errors.hpp"

namespace orlicz {

double RearrangedProfile::value_at(double s) const {
  if (breakpoints.empty() || s <= 0.0 || s > breakpoints.back()) return 0.0;
  // First breakpoint with s_k >= s; the profile is right-continuous with
  // value values[k] on (s_{k-1}, s_k].
  const auto it = std::lower_bound(breakpoints.begin(), breakpoints.end(), s);
  return values[static_cast<std::size_t>(it - breakpoints.begin())];
}

double RearrangedProfile::level_measure(double level) const {
  // |{f* > level}|: the profile is nonincreasing, so this is the largest
  // breakpoint whose step value still exceeds the level.
  double m = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (values[k] > level) {
      m = breakpoints[k];
    } else {
      break;
    }
  }
  return m;
}

void RearrangedProfile::validate() const {
  if (breakpoints.size() != values.size()) {
    throw DomainError("profile breakpoint/value length mismatch");
  }
  double prev_s = 0.0;
  for (std::size_t k = 0; k < breakpoints.size(); ++k) {
    if (!(breakpoints[k] > prev_s)) {
      throw DomainError("profile breakpoints must be strictly increasing");
    }
    if (!std::isfinite(values[k]) || values[k] < 0.0) {
      throw DomainError("profile values must be finite and nonnegative");
    }
    if (k > 0 && values[k] > values[k - 1]) {
      throw DomainError("profile values must be nonincreasing");
    }
    prev_s = breakpoints[k];
  }
}

RearrangedProfile rearrange(const SampledField& f) {
  f.validate();
  const Grid& g = f.grid;
  std::vector<double> mags;
  mags.reserve(g.size());
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    if (g.inside[idx]) mags.push_back(f.magnitude(idx));
  }
  std::sort(mags.begin(), mags.end(), std::greater<double>());

  RearrangedProfile p;
  const double w = g.cell_volume();
  std::size_t k = 0;
  while (k < mags.size()) {
    std::size_t run = k + 1;
    while (run < mags.size() && mags[run] == mags[k]) ++run;
    p.breakpoints.push_back(static_cast<double>(run) * w);
    p.values.push_back(mags[k]);
    k = run;
  }
  p.validate();
  return p;
}

}  // namespace orlicz

#pragma once

#include <cmath>
#include <numbers>

#include "gllab/radial_profile.hpp"

namespace testsupport {

inline constexpr double kFourPi = 4.0 * std::numbers::pi;

/// Default profile, solved once per test binary.
inline const gllab::radial::RadialProfile& profile() {
  static const gllab::radial::RadialProfile p = gllab::radial::solve_profile();
  return p;
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace testsupport

#include "gllab/grid.hpp"

#include <algorithm>
#include <cmath>

#include "gllab/error.hpp"

namespace gllab {

Grid3::Grid3(int n, double h, Vec3 center) : n_(n), h_(h), center_(center) {
  if (n < 16) throw Error(ErrorKind::InvalidParameter, "grid needs n >= 16");
  if (!(h > 0.0) || !std::isfinite(h)) throw Error(ErrorKind::InvalidParameter, "grid spacing must be positive");
}

VectorField3::VectorField3(const Grid3& grid)
    : grid_(grid), values_(3 * grid.node_count(), 0.0), frozen_(grid.node_count(), 0) {}

std::size_t VectorField3::frozen_count() const noexcept {
  return static_cast<std::size_t>(std::count(frozen_.begin(), frozen_.end(), std::uint8_t{1}));
}

double norm(const Vec3& a) { return std::sqrt(norm2(a)); }

}  // namespace gllab

#pragma once

#include <array>
#include <iosfwd>
#include <vector>

#include "gllab/grid.hpp"

namespace gllab {

/// Icosphere: icosahedron with `level` midpoint subdivisions, projected onto
/// the unit sphere.  Triangles are oriented outward.  Vertex weights are one
/// third of the solid angles of the incident triangles and sum to 4 pi.
struct SphereMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<double> vertex_weights;
  int level = 0;

  static SphereMesh icosphere(int level);

  std::size_t edge_count() const;
  int euler_characteristic() const;
  /// Sum of signed triangle solid angles.
  double total_solid_angle() const;
};

/// Signed solid angle of the spherical triangle spanned by three unit vectors
/// (Van Oosterom-Strackee), in (-2 pi, 2 pi].
double signed_solid_angle(const Vec3& a, const Vec3& b, const Vec3& c);

/// OFF text export.
void write_off(const SphereMesh& mesh, std::ostream& os);

}  // namespace gllab

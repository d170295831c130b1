#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gllab/grid.hpp"
#include "gllab/radial_profile.hpp"
#include "gllab/sphere_mesh.hpp"

namespace gllab {

using Mat3 = std::array<std::array<double, 3>, 3>;

inline constexpr Mat3 kIdentity3 = {{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};

inline Vec3 mat_vec(const Mat3& m, const Vec3& v) {
  return {dot(m[0], v), dot(m[1], v), dot(m[2], v)};
}

/// Energy split over a ball of the given radius about the origin, or over the
/// whole cube.
struct EnergyReport {
  double lambda = 0.0;
  double dirichlet = 0.0;
  double potential = 0.0;
  double total = 0.0;
  std::optional<double> radius;

  std::string region() const;
};

struct FieldSample {
  Vec3 value;
  Mat3 jacobian;  // jacobian[c][a] = d u_c / d x_a
};

namespace field {

/// Grid sums with node-mask restriction |x| <= radius (about the origin).
EnergyReport energy(const VectorField3& u, double lambda, std::optional<double> radius = std::nullopt);

VectorField3 gl_residual(const VectorField3& u, double lambda);
/// d E_h / d u at free nodes, zero at frozen nodes (whole-cube energy).
VectorField3 energy_gradient(const VectorField3& u, double lambda);

/// Trilinear interpolation; throws out-of-range outside the cube.
Vec3 interpolate(const VectorField3& u, const Vec3& x);
/// Trilinear interpolation of u and of the nodal central-difference
/// Jacobian (second-order one-sided on cube faces).
FieldSample sample(const VectorField3& u, const Vec3& x);
/// Central-difference Jacobian at a node.
Mat3 node_jacobian(const VectorField3& u, int i, int j, int k);

/// u(R sigma) at every mesh vertex; requires R <= L - h about the grid center.
std::vector<Vec3> sample_on_sphere(const VectorField3& u, double R, const SphereMesh& mesh);

VectorField3 from_function(const Grid3& grid, const std::function<Vec3(const Vec3&)>& fn);
VectorField3 constant_field(const Grid3& grid, const Vec3& value);
/// x / |x| about `center`, with (0, 0, 0) at the center itself.
VectorField3 radial_unit_field(const Grid3& grid, const Vec3& center = {0.0, 0.0, 0.0});
/// T (x - c) / |x - c| * f(lambda |x - c|).
Vec3 hedgehog_value(const radial::RadialProfile& p, double lambda, const Vec3& x, const Vec3& center = {0, 0, 0},
                    const Mat3& rotation = kIdentity3);
VectorField3 hedgehog_field(const Grid3& grid, const radial::RadialProfile& p, double lambda,
                            const Vec3& center = {0.0, 0.0, 0.0}, const Mat3& rotation = kIdentity3);

/// Freezes every node on the six cube faces.
void freeze_faces(VectorField3& u);

/// Node-wise S u(S^T x) for a signed permutation matrix S (a symmetry of
/// the cube about its center).
VectorField3 apply_cube_symmetry(const VectorField3& u, const Mat3& signed_permutation);
/// All 48 signed permutation matrices.
std::vector<Mat3> cube_symmetries();

double max_node_norm(const VectorField3& u);

}  // namespace field
}  // namespace gllab

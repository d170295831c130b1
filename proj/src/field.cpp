#include "gllab/field.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gllab/error.hpp"
#include "gllab/kernels.hpp"

namespace gllab {

std::string EnergyReport::region() const {
  if (!radius) return "cube";
  std::ostringstream os;
  os.precision(17);
  os << "ball:" << *radius;
  return os.str();
}

namespace field {

EnergyReport energy(const VectorField3& u, double lambda, std::optional<double> radius) {
  if (!(lambda >= 0.0)) throw Error(ErrorKind::InvalidParameter, "lambda must be non-negative");
  std::optional<kernels::Ball> ball;
  if (radius) {
    if (!(*radius >= 0.0) || *radius > u.grid().half_width() * (1.0 + 1e-12))
      throw Error(ErrorKind::OutOfRange, "energy ball radius exceeds the cube half-width");
    ball = kernels::Ball{{0.0, 0.0, 0.0}, *radius};
  }
  const kernels::EnergyParts e = kernels::energy(u, lambda, ball);
  EnergyReport r;
  r.lambda = lambda;
  r.dirichlet = e.dirichlet;
  r.potential = e.potential;
  r.total = e.dirichlet + e.potential;
  r.radius = radius;
  return r;
}

namespace {

VectorField3 like(const VectorField3& u, std::span<const double> vals) {
  VectorField3 out(u.grid());
  std::copy(vals.begin(), vals.end(), out.values().begin());
  for (std::size_t i = 0; i < u.node_count(); ++i) out.set_frozen(i, u.frozen(i));
  return out;
}

struct CellCoord {
  int idx[3];
  double frac[3];
};

CellCoord locate(const Grid3& g, const Vec3& x) {
  CellCoord c{};
  const double L = g.half_width();
  const double eps = 1e-9;
  for (int a = 0; a < 3; ++a) {
    const double t = (x[static_cast<std::size_t>(a)] - g.center()[static_cast<std::size_t>(a)] + L) / g.h();
    if (!(t >= -eps && t <= (g.n() - 1) + eps))
      throw Error(ErrorKind::OutOfRange, "sample point outside the grid cube");
    int i = static_cast<int>(std::floor(t));
    i = std::clamp(i, 0, g.n() - 2);
    c.idx[a] = i;
    c.frac[a] = std::clamp(t - i, 0.0, 1.0);
  }
  return c;
}

}  // namespace

VectorField3 gl_residual(const VectorField3& u, double lambda) {
  std::vector<double> buf(u.values().size());
  kernels::gl_residual(u, lambda, buf);
  return like(u, buf);
}

VectorField3 energy_gradient(const VectorField3& u, double lambda) {
  std::vector<double> buf(u.values().size());
  kernels::energy_gradient(u, lambda, buf);
  return like(u, buf);
}

Vec3 interpolate(const VectorField3& u, const Vec3& x) {
  const Grid3& g = u.grid();
  const CellCoord c = locate(g, x);
  Vec3 out{0.0, 0.0, 0.0};
  for (int dz = 0; dz < 2; ++dz)
    for (int dy = 0; dy < 2; ++dy)
      for (int dx = 0; dx < 2; ++dx) {
        const double w = (dx ? c.frac[0] : 1.0 - c.frac[0]) * (dy ? c.frac[1] : 1.0 - c.frac[1]) *
                         (dz ? c.frac[2] : 1.0 - c.frac[2]);
        if (w == 0.0) continue;
        out = out + w * u.at(g.index(c.idx[0] + dx, c.idx[1] + dy, c.idx[2] + dz));
      }
  return out;
}

Mat3 node_jacobian(const VectorField3& u, int i, int j, int k) {
  const Grid3& g = u.grid();
  const int n = g.n();
  const double inv_2h = 0.5 / g.h();
  Mat3 J{};
  const int base[3] = {i, j, k};
  for (int a = 0; a < 3; ++a) {
    auto at = [&](int offset) {
      int p[3] = {base[0], base[1], base[2]};
      p[a] += offset;
      return u.at(g.index(p[0], p[1], p[2]));
    };
    Vec3 d;
    if (base[a] == 0) d = (-3.0 * at(0)) + (4.0 * at(1)) - at(2);
    else if (base[a] == n - 1) d = (3.0 * at(0)) - (4.0 * at(-1)) + at(-2);
    else d = at(1) - at(-1);
    for (int c = 0; c < 3; ++c) J[static_cast<std::size_t>(c)][static_cast<std::size_t>(a)] = d[static_cast<std::size_t>(c)] * inv_2h;
  }
  return J;
}

FieldSample sample(const VectorField3& u, const Vec3& x) {
  const Grid3& g = u.grid();
  const CellCoord c = locate(g, x);
  FieldSample s{{0.0, 0.0, 0.0}, {}};
  for (int dz = 0; dz < 2; ++dz)
    for (int dy = 0; dy < 2; ++dy)
      for (int dx = 0; dx < 2; ++dx) {
        const double w = (dx ? c.frac[0] : 1.0 - c.frac[0]) * (dy ? c.frac[1] : 1.0 - c.frac[1]) *
                         (dz ? c.frac[2] : 1.0 - c.frac[2]);
        if (w == 0.0) continue;
        const int i = c.idx[0] + dx, j = c.idx[1] + dy, k = c.idx[2] + dz;
        s.value = s.value + w * u.at(g.index(i, j, k));
        const Mat3 J = node_jacobian(u, i, j, k);
        for (std::size_t r = 0; r < 3; ++r)
          for (std::size_t q = 0; q < 3; ++q) s.jacobian[r][q] += w * J[r][q];
      }
  return s;
}

std::vector<Vec3> sample_on_sphere(const VectorField3& u, double R, const SphereMesh& mesh) {
  const Grid3& g = u.grid();
  if (!(R > 0.0)) throw Error(ErrorKind::InvalidParameter, "sphere radius must be positive");
  if (R > g.half_width() - g.h() + 1e-12) throw Error(ErrorKind::OutOfRange, "sphere radius exceeds L - h");
  std::vector<Vec3> out(mesh.vertices.size());
  for (std::size_t v = 0; v < mesh.vertices.size(); ++v) out[v] = interpolate(u, g.center() + R * mesh.vertices[v]);
  return out;
}

VectorField3 from_function(const Grid3& grid, const std::function<Vec3(const Vec3&)>& fn) {
  VectorField3 u(grid);
  for (std::size_t node = 0; node < grid.node_count(); ++node) u.set(node, fn(grid.position(node)));
  return u;
}

VectorField3 constant_field(const Grid3& grid, const Vec3& value) {
  return from_function(grid, [&](const Vec3&) { return value; });
}

VectorField3 radial_unit_field(const Grid3& grid, const Vec3& center) {
  return from_function(grid, [&](const Vec3& x) {
    const Vec3 d = x - center;
    const double r = norm(d);
    return r == 0.0 ? Vec3{0.0, 0.0, 0.0} : (1.0 / r) * d;
  });
}

Vec3 hedgehog_value(const radial::RadialProfile& p, double lambda, const Vec3& x, const Vec3& center,
                    const Mat3& rotation) {
  const Vec3 d = x - center;
  const double r = norm(d);
  if (r == 0.0) return {0.0, 0.0, 0.0};
  const double f = radial::evaluate_profile(p, lambda * r).f;
  return (f / r) * mat_vec(rotation, d);
}

VectorField3 hedgehog_field(const Grid3& grid, const radial::RadialProfile& p, double lambda, const Vec3& center,
                            const Mat3& rotation) {
  return from_function(grid, [&](const Vec3& x) { return hedgehog_value(p, lambda, x, center, rotation); });
}

void freeze_faces(VectorField3& u) {
  const Grid3& g = u.grid();
  const int m = g.n() - 1;
  for (std::size_t node = 0; node < g.node_count(); ++node) {
    const auto [i, j, k] = g.ijk(node);
    if (i == 0 || j == 0 || k == 0 || i == m || j == m || k == m) u.set_frozen(node, true);
  }
}

VectorField3 apply_cube_symmetry(const VectorField3& u, const Mat3& s) {
  const Grid3& g = u.grid();
  const int n = g.n();
  VectorField3 out(g);
  for (std::size_t node = 0; node < g.node_count(); ++node) {
    const auto c = g.ijk(node);
    // Doubled offsets from the center keep even n exact.
    const Vec3 o{static_cast<double>(2 * c[0] - (n - 1)), static_cast<double>(2 * c[1] - (n - 1)),
                 static_cast<double>(2 * c[2] - (n - 1))};
    // S^T o
    Vec3 src{};
    for (std::size_t a = 0; a < 3; ++a) src[a] = s[0][a] * o[0] + s[1][a] * o[1] + s[2][a] * o[2];
    const int si = static_cast<int>(std::lround((src[0] + (n - 1)) / 2));
    const int sj = static_cast<int>(std::lround((src[1] + (n - 1)) / 2));
    const int sk = static_cast<int>(std::lround((src[2] + (n - 1)) / 2));
    const std::size_t from = g.index(si, sj, sk);
    out.set(node, mat_vec(s, u.at(from)));
    out.set_frozen(node, u.frozen(from));
  }
  return out;
}

std::vector<Mat3> cube_symmetries() {
  std::vector<Mat3> out;
  int perm[3] = {0, 1, 2};
  std::sort(perm, perm + 3);
  do {
    for (int signs = 0; signs < 8; ++signs) {
      Mat3 m{};
      for (int r = 0; r < 3; ++r)
        m[static_cast<std::size_t>(r)][static_cast<std::size_t>(perm[r])] = (signs >> r & 1) ? -1.0 : 1.0;
      out.push_back(m);
    }
  } while (std::next_permutation(perm, perm + 3));
  return out;
}

double max_node_norm(const VectorField3& u) {
  double m = 0.0;
  for (std::size_t i = 0; i < u.node_count(); ++i) m = std::max(m, norm(u.at(i)));
  return m;
}

}  // namespace field
}  // namespace gllab

#include "gllab/sphere_mesh.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <ostream>
#include <set>
#include <utility>

#include "gllab/error.hpp"

namespace gllab {

double signed_solid_angle(const Vec3& a, const Vec3& b, const Vec3& c) {
  const double num = dot(a, cross(b, c));
  const double den = 1.0 + dot(a, b) + dot(b, c) + dot(c, a);
  return 2.0 * std::atan2(num, den);
}

SphereMesh SphereMesh::icosphere(int level) {
  if (level < 0 || level > 8) throw Error(ErrorKind::InvalidParameter, "icosphere level must be in [0, 8]");
  const double phi = 0.5 * (1.0 + std::sqrt(5.0));
  SphereMesh m;
  m.level = level;
  m.vertices = {{-1, phi, 0}, {1, phi, 0}, {-1, -phi, 0}, {1, -phi, 0}, {0, -1, phi}, {0, 1, phi},
                {0, -1, -phi}, {0, 1, -phi}, {phi, 0, -1}, {phi, 0, 1}, {-phi, 0, -1}, {-phi, 0, 1}};
  for (auto& v : m.vertices) v = (1.0 / norm(v)) * v;
  m.triangles = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
                 {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
                 {3, 8, 9},  {4, 9, 5},  {2, 4, 11}, {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};

  for (int l = 0; l < level; ++l) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      Vec3 v = m.vertices[static_cast<std::size_t>(a)] + m.vertices[static_cast<std::size_t>(b)];
      v = (1.0 / norm(v)) * v;
      m.vertices.push_back(v);
      const int id = static_cast<int>(m.vertices.size()) - 1;
      midpoint.emplace(key, id);
      return id;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(4 * m.triangles.size());
    for (const auto& t : m.triangles) {
      const int a = mid(t[0], t[1]), b = mid(t[1], t[2]), c = mid(t[2], t[0]);
      next.push_back({t[0], a, c});
      next.push_back({t[1], b, a});
      next.push_back({t[2], c, b});
      next.push_back({a, b, c});
    }
    m.triangles = std::move(next);
  }

  // Outward orientation.
  for (auto& t : m.triangles) {
    const auto& a = m.vertices[static_cast<std::size_t>(t[0])];
    const auto& b = m.vertices[static_cast<std::size_t>(t[1])];
    const auto& c = m.vertices[static_cast<std::size_t>(t[2])];
    if (dot(a, cross(b, c)) < 0.0) std::swap(t[1], t[2]);
  }

  m.vertex_weights.assign(m.vertices.size(), 0.0);
  for (const auto& t : m.triangles) {
    const double w = signed_solid_angle(m.vertices[static_cast<std::size_t>(t[0])],
                                        m.vertices[static_cast<std::size_t>(t[1])],
                                        m.vertices[static_cast<std::size_t>(t[2])]) / 3.0;
    for (int v : t) m.vertex_weights[static_cast<std::size_t>(v)] += w;
  }
  return m;
}

std::size_t SphereMesh::edge_count() const {
  std::set<std::pair<int, int>> edges;
  for (const auto& t : triangles)
    for (int e = 0; e < 3; ++e) edges.insert(std::minmax(t[static_cast<std::size_t>(e)], t[static_cast<std::size_t>((e + 1) % 3)]));
  return edges.size();
}

int SphereMesh::euler_characteristic() const {
  return static_cast<int>(vertices.size()) - static_cast<int>(edge_count()) + static_cast<int>(triangles.size());
}

double SphereMesh::total_solid_angle() const {
  double s = 0.0;
  for (const auto& t : triangles)
    s += signed_solid_angle(vertices[static_cast<std::size_t>(t[0])], vertices[static_cast<std::size_t>(t[1])],
                            vertices[static_cast<std::size_t>(t[2])]);
  return s;
}

void write_off(const SphereMesh& mesh, std::ostream& os) {
  os << "OFF\n" << mesh.vertices.size() << ' ' << mesh.triangles.size() << " 0\n";
  os.precision(17);
  for (const auto& v : mesh.vertices) os << v[0] << ' ' << v[1] << ' ' << v[2] << '\n';
  for (const auto& t : mesh.triangles) os << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

}  // namespace gllab

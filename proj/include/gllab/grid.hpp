#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace gllab {

using Vec3 = std::array<double, 3>;

/// Cubic, node-centered grid over center + [-L, L]^3 with L = h (n - 1) / 2.
/// Node (i, j, k) has linear index i + n (j + n k) (x fastest).
class Grid3 {
 public:
  Grid3(int n, double h, Vec3 center = {0.0, 0.0, 0.0});

  int n() const noexcept { return n_; }
  double h() const noexcept { return h_; }
  const Vec3& center() const noexcept { return center_; }
  double half_width() const noexcept { return 0.5 * h_ * (n_ - 1); }
  std::size_t node_count() const noexcept {
    return static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_);
  }

  std::size_t index(int i, int j, int k) const noexcept {
    return static_cast<std::size_t>(i) +
           static_cast<std::size_t>(n_) * (static_cast<std::size_t>(j) + static_cast<std::size_t>(n_) * static_cast<std::size_t>(k));
  }
  std::array<int, 3> ijk(std::size_t node) const noexcept {
    const auto n = static_cast<std::size_t>(n_);
    return {static_cast<int>(node % n), static_cast<int>((node / n) % n), static_cast<int>(node / (n * n))};
  }
  double coord(int i, int axis) const noexcept {
    return center_[static_cast<std::size_t>(axis)] + (i - 0.5 * (n_ - 1)) * h_;
  }
  Vec3 position(int i, int j, int k) const noexcept { return {coord(i, 0), coord(j, 1), coord(k, 2)}; }
  Vec3 position(std::size_t node) const noexcept {
    const auto c = ijk(node);
    return position(c[0], c[1], c[2]);
  }

  bool operator==(const Grid3&) const = default;

 private:
  int n_;
  double h_;
  Vec3 center_;
};

/// Three components per node, plus a frozen (Dirichlet) mask.  Frozen nodes
/// are never updated by solvers.
class VectorField3 {
 public:
  explicit VectorField3(const Grid3& grid);

  const Grid3& grid() const noexcept { return grid_; }
  std::size_t node_count() const noexcept { return grid_.node_count(); }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }
  std::span<const std::uint8_t> frozen_mask() const noexcept { return frozen_; }

  Vec3 at(std::size_t node) const noexcept {
    return {values_[3 * node], values_[3 * node + 1], values_[3 * node + 2]};
  }
  void set(std::size_t node, const Vec3& v) noexcept {
    values_[3 * node] = v[0];
    values_[3 * node + 1] = v[1];
    values_[3 * node + 2] = v[2];
  }
  bool frozen(std::size_t node) const noexcept { return frozen_[node] != 0; }
  void set_frozen(std::size_t node, bool f) noexcept { frozen_[node] = f ? 1 : 0; }
  std::size_t frozen_count() const noexcept;

  bool operator==(const VectorField3&) const = default;

 private:
  Grid3 grid_;
  std::vector<double> values_;
  std::vector<std::uint8_t> frozen_;
};

inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm2(const Vec3& a) { return dot(a, a); }
double norm(const Vec3& a);
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }

}  // namespace gllab

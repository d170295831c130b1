#pragma once

// Grid kernels for the discrete Ginzburg-Landau energy
//
//   E_h(u) = (h/2) sum_edges |u_j - u_i|^2 + h^3 sum_nodes (lambda^2/4)(1 - |u_i|^2)^2,
//
// whose exact gradient is -h^3 (Lap_7 u + lambda^2 u (1 - |u|^2)) with the
// 7-point Laplacian (one-sided neighbour set on cube faces).  Restricted to a
// ball, each node carries half of each incident edge.
//
// The top-level functions are OpenMP-parallel over z-slabs with per-slab
// compensated sums combined in slab order, so results do not depend on the
// thread count.  `reference::` holds plain serial versions used by tests and
// the benchmark.

#include <cmath>
#include <optional>
#include <span>

#include "gllab/grid.hpp"

namespace gllab::kernels {

struct EnergyParts {
  double dirichlet = 0.0;
  double potential = 0.0;
};

/// Ball B_radius(center); nullopt means the whole cube.
struct Ball {
  Vec3 center{0.0, 0.0, 0.0};
  double radius = 0.0;
};

EnergyParts energy(const VectorField3& u, double lambda, const std::optional<Ball>& region = std::nullopt);

/// Writes the gradient of the whole-cube energy into grad (3 per node, zero
/// on frozen nodes) and returns the whole-cube energy.
double energy_gradient(const VectorField3& u, double lambda, std::span<double> grad);

/// Lap_7 u + lambda^2 u (1 - |u|^2) on free nodes, zero on frozen nodes.
void gl_residual(const VectorField3& u, double lambda, std::span<double> out);

/// Largest absolute component of v.
double sup_norm(std::span<const double> v);

namespace reference {
EnergyParts energy(const VectorField3& u, double lambda, const std::optional<Ball>& region = std::nullopt);
double energy_gradient(const VectorField3& u, double lambda, std::span<double> grad);
void gl_residual(const VectorField3& u, double lambda, std::span<double> out);
}  // namespace reference

/// Neumaier compensated accumulator.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) comp_ += (sum_ - t) + x;
    else comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace gllab::kernels

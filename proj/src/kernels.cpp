#include "gllab/kernels.hpp"

#include <algorithm>
#include <vector>

#include "gllab/error.hpp"

namespace gllab::kernels {

namespace {

struct NodeTerms {
  double edge_sq = 0.0;          // sum over incident edges of |u_j - u_i|^2
  double lap[3] = {0.0, 0.0, 0.0};  // sum over neighbours of (u_j - u_i)
};

inline void add_neighbour(const double* u, const double* v, NodeTerms& t) noexcept {
  const double d0 = v[0] - u[0], d1 = v[1] - u[1], d2 = v[2] - u[2];
  t.edge_sq += d0 * d0 + d1 * d1 + d2 * d2;
  t.lap[0] += d0;
  t.lap[1] += d1;
  t.lap[2] += d2;
}

inline NodeTerms node_terms(const double* vals, int n, int i, int j, int k, std::size_t idx) noexcept {
  const std::size_t sx = 3, sy = 3 * static_cast<std::size_t>(n), sz = sy * static_cast<std::size_t>(n);
  const double* u = vals + 3 * idx;
  NodeTerms t;
  if (i > 0) add_neighbour(u, u - sx, t);
  if (i < n - 1) add_neighbour(u, u + sx, t);
  if (j > 0) add_neighbour(u, u - sy, t);
  if (j < n - 1) add_neighbour(u, u + sy, t);
  if (k > 0) add_neighbour(u, u - sz, t);
  if (k < n - 1) add_neighbour(u, u + sz, t);
  return t;
}

void check_size(const VectorField3& u, std::span<const double> out) {
  if (out.size() != u.values().size())
    throw Error(ErrorKind::InvalidParameter, "output buffer size does not match field");
}

}  // namespace

EnergyParts energy(const VectorField3& u, double lambda, const std::optional<Ball>& region) {
  const Grid3& g = u.grid();
  const int n = g.n();
  const double h = g.h();
  const double h3 = h * h * h;
  const double quarter_lambda2 = 0.25 * lambda * lambda;
  const double inv_4h2 = 1.0 / (4.0 * h * h);
  const double* vals = u.values().data();
  const double r2 = region ? region->radius * region->radius : 0.0;

  std::vector<double> slab_d(static_cast<std::size_t>(n)), slab_p(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(static)
  for (int k = 0; k < n; ++k) {
    CompensatedSum sd, sp;
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        if (region) {
          const Vec3 x = g.position(i, j, k) - region->center;
          if (norm2(x) > r2) continue;
        }
        const std::size_t idx = g.index(i, j, k);
        const NodeTerms t = node_terms(vals, n, i, j, k, idx);
        const double* p = vals + 3 * idx;
        const double w = 1.0 - (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
        sd.add(t.edge_sq * inv_4h2);
        sp.add(quarter_lambda2 * w * w);
      }
    }
    slab_d[static_cast<std::size_t>(k)] = sd.value();
    slab_p[static_cast<std::size_t>(k)] = sp.value();
  }
  CompensatedSum d, p;
  for (int k = 0; k < n; ++k) {
    d.add(slab_d[static_cast<std::size_t>(k)]);
    p.add(slab_p[static_cast<std::size_t>(k)]);
  }
  return {h3 * d.value(), h3 * p.value()};
}

double energy_gradient(const VectorField3& u, double lambda, std::span<double> grad) {
  check_size(u, grad);
  const Grid3& g = u.grid();
  const int n = g.n();
  const double h = g.h();
  const double h3 = h * h * h;
  const double lambda2 = lambda * lambda;
  const double inv_4h2 = 1.0 / (4.0 * h * h);
  const double* vals = u.values().data();
  const auto frozen = u.frozen_mask();

  std::vector<double> slab_e(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(static)
  for (int k = 0; k < n; ++k) {
    CompensatedSum se;
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        const std::size_t idx = g.index(i, j, k);
        const NodeTerms t = node_terms(vals, n, i, j, k, idx);
        const double* p = vals + 3 * idx;
        const double w = 1.0 - (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
        se.add(t.edge_sq * inv_4h2 + 0.25 * lambda2 * w * w);
        double* out = grad.data() + 3 * idx;
        if (frozen[idx]) {
          out[0] = out[1] = out[2] = 0.0;
        } else {
          for (int c = 0; c < 3; ++c) out[c] = -h * t.lap[c] - h3 * lambda2 * w * p[c];
        }
      }
    }
    slab_e[static_cast<std::size_t>(k)] = se.value();
  }
  CompensatedSum e;
  for (double v : slab_e) e.add(v);
  return h3 * e.value();
}

void gl_residual(const VectorField3& u, double lambda, std::span<double> out) {
  check_size(u, out);
  const Grid3& g = u.grid();
  const int n = g.n();
  const double inv_h2 = 1.0 / (g.h() * g.h());
  const double lambda2 = lambda * lambda;
  const double* vals = u.values().data();
  const auto frozen = u.frozen_mask();

#pragma omp parallel for schedule(static)
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        const std::size_t idx = g.index(i, j, k);
        double* r = out.data() + 3 * idx;
        if (frozen[idx]) {
          r[0] = r[1] = r[2] = 0.0;
          continue;
        }
        const NodeTerms t = node_terms(vals, n, i, j, k, idx);
        const double* p = vals + 3 * idx;
        const double w = 1.0 - (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
        for (int c = 0; c < 3; ++c) r[c] = t.lap[c] * inv_h2 + lambda2 * w * p[c];
      }
    }
  }
}

double sup_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

namespace reference {

namespace {

constexpr int kOffsets[6][3] = {{-1, 0, 0}, {1, 0, 0}, {0, -1, 0}, {0, 1, 0}, {0, 0, -1}, {0, 0, 1}};

bool inside(const Grid3& g, int i, int j, int k) {
  return i >= 0 && j >= 0 && k >= 0 && i < g.n() && j < g.n() && k < g.n();
}

}  // namespace

EnergyParts energy(const VectorField3& u, double lambda, const std::optional<Ball>& region) {
  const Grid3& g = u.grid();
  const double h = g.h();
  CompensatedSum d, p;
  for (std::size_t node = 0; node < g.node_count(); ++node) {
    if (region && norm2(g.position(node) - region->center) > region->radius * region->radius) continue;
    const auto [i, j, k] = g.ijk(node);
    const Vec3 ui = u.at(node);
    double edges = 0.0;
    for (const auto& o : kOffsets) {
      if (!inside(g, i + o[0], j + o[1], k + o[2])) continue;
      edges += norm2(u.at(g.index(i + o[0], j + o[1], k + o[2])) - ui);
    }
    const double w = 1.0 - norm2(ui);
    d.add(0.5 * (0.5 * edges / (h * h)) * h * h * h);
    p.add(0.25 * lambda * lambda * w * w * h * h * h);
  }
  return {d.value(), p.value()};
}

void gl_residual(const VectorField3& u, double lambda, std::span<double> out) {
  check_size(u, out);
  const Grid3& g = u.grid();
  const double h = g.h();
  for (std::size_t node = 0; node < g.node_count(); ++node) {
    Vec3 r{0.0, 0.0, 0.0};
    if (!u.frozen(node)) {
      const auto [i, j, k] = g.ijk(node);
      const Vec3 ui = u.at(node);
      for (const auto& o : kOffsets) {
        if (!inside(g, i + o[0], j + o[1], k + o[2])) continue;
        r = r + (1.0 / (h * h)) * (u.at(g.index(i + o[0], j + o[1], k + o[2])) - ui);
      }
      r = r + lambda * lambda * (1.0 - norm2(ui)) * ui;
    }
    for (int c = 0; c < 3; ++c) out[3 * node + static_cast<std::size_t>(c)] = r[static_cast<std::size_t>(c)];
  }
}

double energy_gradient(const VectorField3& u, double lambda, std::span<double> grad) {
  gl_residual(u, lambda, grad);
  const double h = u.grid().h();
  for (double& x : grad) x *= -h * h * h;
  const EnergyParts e = energy(u, lambda);
  return e.dirichlet + e.potential;
}

}  // namespace reference

}  // namespace gllab::kernels

#include "gllab/ball_minimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Dense>

#include "gllab/error.hpp"
#include "gllab/kernels.hpp"

namespace gllab::ball {

Init parse_init(const std::string& name) {
  if (name == "identity-extension") return Init::IdentityExtension;
  if (name == "hedgehog") return Init::Hedgehog;
  if (name == "random-perturbed") return Init::RandomPerturbed;
  throw Error(ErrorKind::InvalidParameter, "unknown init '" + name + "'");
}

std::string to_string(Init init) {
  switch (init) {
    case Init::IdentityExtension: return "identity-extension";
    case Init::Hedgehog: return "hedgehog";
    case Init::RandomPerturbed: return "random-perturbed";
  }
  return "unknown";
}

double BallProblem::spacing() const { return 2.0 / (n - 5); }

Grid3 BallProblem::grid() const {
  if (n < 17 || n % 2 == 0) throw Error(ErrorKind::InvalidParameter, "ball grid size must be odd and >= 17");
  return Grid3(n, spacing());
}

bool BallProblem::resolves_core() const { return spacing() <= 0.5 / lambda; }

VectorField3 initial_field(const BallProblem& p, const radial::RadialProfile& profile) {
  if (!(p.lambda >= 1.0)) throw Error(ErrorKind::InvalidParameter, "lambda must be >= 1");
  const Grid3 g = p.grid();
  VectorField3 u(g);
  std::mt19937_64 rng(p.seed);
  std::uniform_real_distribution<double> noise(-1.0, 1.0);
  for (std::size_t node = 0; node < g.node_count(); ++node) {
    const Vec3 x = g.position(node);
    const double r = norm(x);
    if (r >= 1.0) {
      u.set(node, (1.0 / r) * x);
      u.set_frozen(node, true);
      continue;
    }
    switch (p.init) {
      case Init::IdentityExtension: u.set(node, x); break;
      case Init::Hedgehog: u.set(node, field::hedgehog_value(profile, p.lambda, x)); break;
      case Init::RandomPerturbed: {
        Vec3 v = field::hedgehog_value(profile, p.lambda, x);
        for (auto& c : v) c += p.perturbation * noise(rng);
        const double m = norm(v);
        if (m > 1.0) v = (1.0 / m) * v;
        u.set(node, v);
        break;
      }
    }
  }
  return u;
}

namespace {

// u_new = P(u - alpha g) on free nodes.
void take_step(const VectorField3& u, std::span<const double> g, double alpha, bool project, VectorField3& out) {
  const auto src = u.values();
  auto dst = out.values();
  const auto frozen = u.frozen_mask();
  const std::ptrdiff_t nodes = static_cast<std::ptrdiff_t>(u.node_count());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t node = 0; node < nodes; ++node) {
    const std::size_t b = 3 * static_cast<std::size_t>(node);
    if (frozen[static_cast<std::size_t>(node)]) {
      dst[b] = src[b];
      dst[b + 1] = src[b + 1];
      dst[b + 2] = src[b + 2];
      continue;
    }
    double v0 = src[b] - alpha * g[b], v1 = src[b + 1] - alpha * g[b + 1], v2 = src[b + 2] - alpha * g[b + 2];
    if (project) {
      const double m2 = v0 * v0 + v1 * v1 + v2 * v2;
      if (m2 > 1.0) {
        const double s = 1.0 / std::sqrt(m2);
        v0 *= s;
        v1 *= s;
        v2 *= s;
      }
    }
    dst[b] = v0;
    dst[b + 1] = v1;
    dst[b + 2] = v2;
  }
}

}  // namespace

MinimizeResult descend(VectorField3 u, double lambda, const DescentOptions& opt) {
  const double h = u.grid().h();
  const double h3 = h * h * h;
  const double tol = opt.grad_tol * h3;
  const std::size_t m = u.values().size();

  std::vector<double> g(m), g_new(m);
  VectorField3 trial(u);
  double e = kernels::energy_gradient(u, lambda, g);
  double gnorm = kernels::sup_norm(g);

  MinimizeResult res{u, {}, {}, {}, e, field::max_node_norm(u), 0, false, false};
  res.trace.push_back({0, e, gnorm, 0.0});

  // Stable explicit step for the stiffest mode, used to seed and bound BB.
  const double alpha_min = 1e-3 / (12.0 * h + 2.0 * h3 * lambda * lambda);
  const double alpha_max = 1e6 * alpha_min;
  double alpha = 1.0 / (12.0 * h + 2.0 * h3 * lambda * lambda);

  int it = 0;
  bool stalled = false;
  while (gnorm > tol && it < opt.max_iterations) {
    double step = std::clamp(alpha, alpha_min, alpha_max);
    double e_new = 0.0;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      take_step(u, g, step, opt.project_unit_ball, trial);
      e_new = kernels::energy_gradient(trial, lambda, g_new);
      // Armijo condition along the projected step d = u_new - u: E decreases by c <g, -d>.
      double decrease = 0.0;
      {
        const auto a = u.values(), b = trial.values();
        kernels::CompensatedSum s;
        for (std::size_t i = 0; i < m; ++i) s.add(g[i] * (a[i] - b[i]));
        decrease = s.value();
      }
      if (e_new <= e - opt.armijo * decrease && e_new <= e) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      stalled = true;
      break;
    }
    ++it;

    // BB1 step from s = u_new - u, y = g_new - g.
    double ss = 0.0, sy = 0.0;
    {
      const auto a = u.values(), b = trial.values();
      kernels::CompensatedSum s1, s2;
      for (std::size_t i = 0; i < m; ++i) {
        const double si = b[i] - a[i];
        s1.add(si * si);
        s2.add(si * (g_new[i] - g[i]));
      }
      ss = s1.value();
      sy = s2.value();
    }
    alpha = sy > 0.0 ? ss / sy : alpha_max;

    std::swap(u, trial);
    std::swap(g, g_new);
    e = e_new;
    gnorm = kernels::sup_norm(g);
    res.max_norm_seen = std::max(res.max_norm_seen, field::max_node_norm(u));
    res.trace.push_back({it, e, gnorm, step});
  }

  res.iterations = it;
  res.converged = gnorm <= tol;
  res.stalled = stalled;
  res.cube_energy = field::energy(u, lambda);
  const double L = u.grid().half_width();
  res.energy = field::energy(u, lambda, std::min(1.0, L));
  res.field = std::move(u);
  return res;
}

MinimizeResult minimize(const BallProblem& p, const radial::RadialProfile& profile) {
  VectorField3 u0 = initial_field(p, profile);
  DescentOptions opt{p.grad_tol, p.max_iterations, p.armijo, p.project_unit_ball};
  MinimizeResult res = descend(std::move(u0), p.lambda, opt);
  res.resolution_warning = !p.resolves_core();
  return res;
}

VorticityReport vorticity(const VectorField3& u, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw Error(ErrorKind::InvalidParameter, "delta must lie in (0, 1)");
  const Grid3& g = u.grid();
  VorticityReport rep;
  rep.delta = delta;
  rep.min_modulus = std::numeric_limits<double>::infinity();
  bool any_free = false;
  for (std::size_t node = 0; node < g.node_count(); ++node) {
    if (u.frozen(node)) continue;
    any_free = true;
    const double m = norm(u.at(node));
    if (m < rep.min_modulus) {
      rep.min_modulus = m;
      rep.min_node = node;
    }
    if (m <= delta) rep.cells.push_back(node);
  }
  if (!any_free) throw Error(ErrorKind::InvalidParameter, "field has no free nodes");

  std::vector<Vec3> pts(rep.cells.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    pts[i] = g.position(rep.cells[i]);
    rep.max_dist_origin = std::max(rep.max_dist_origin, norm(pts[i]));
  }
  const std::ptrdiff_t np = static_cast<std::ptrdiff_t>(pts.size());
  double diam2 = 0.0;
#pragma omp parallel for schedule(dynamic, 64) reduction(max : diam2)
  for (std::ptrdiff_t a = 0; a < np; ++a)
    for (std::ptrdiff_t b = a + 1; b < np; ++b)
      diam2 = std::max(diam2, norm2(pts[static_cast<std::size_t>(a)] - pts[static_cast<std::size_t>(b)]));
  rep.diameter = std::sqrt(diam2);

  // Quadratic least-squares fit of |u|^2 on the 3x3x3 block around the
  // minimizing node, in units of h.
  rep.zero_estimate = g.position(rep.min_node);
  rep.fit_residual = rep.min_modulus;
  const auto c = g.ijk(rep.min_node);
  const int n = g.n();
  if (c[0] > 0 && c[1] > 0 && c[2] > 0 && c[0] < n - 1 && c[1] < n - 1 && c[2] < n - 1) {
    Eigen::Matrix<double, 27, 10> A;
    Eigen::Matrix<double, 27, 1> b;
    int row = 0;
    for (int dz = -1; dz <= 1; ++dz)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx, ++row) {
          const double x = dx, y = dy, z = dz;
          A.row(row) << 1, x, y, z, 0.5 * x * x, 0.5 * y * y, 0.5 * z * z, x * y, x * z, y * z;
          b(row) = norm2(u.at(g.index(c[0] + dx, c[1] + dy, c[2] + dz)));
        }
    const Eigen::Matrix<double, 10, 1> q = A.colPivHouseholderQr().solve(b);
    Eigen::Matrix3d H;
    H << q(4), q(7), q(8), q(7), q(5), q(9), q(8), q(9), q(6);
    const Eigen::Vector3d grad(q(1), q(2), q(3));
    const double misfit = (A * q - b).cwiseAbs().maxCoeff();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(H);
    if (es.eigenvalues().minCoeff() > 0.0) {
      const Eigen::Vector3d d = -H.ldlt().solve(grad);
      if (d.cwiseAbs().maxCoeff() <= 1.0) {
        const double qmin = q(0) + 0.5 * grad.dot(d);
        rep.zero_estimate = rep.zero_estimate + g.h() * Vec3{d(0), d(1), d(2)};
        rep.fit_residual = std::sqrt(std::max(qmin, 0.0) + misfit);
        rep.subgrid_fit = true;
      }
    }
  }
  return rep;
}

VectorField3 recenter_rescale(const VectorField3& u, double lambda, const Vec3& zero, const Grid3& target) {
  if (!(lambda > 0.0)) throw Error(ErrorKind::InvalidParameter, "lambda must be positive");
  const double reach = target.half_width() + std::max({std::abs(target.center()[0]), std::abs(target.center()[1]),
                                                       std::abs(target.center()[2])});
  if (2.0 * reach > lambda * (1.0 - norm(zero)) + 1e-12)
    throw Error(ErrorKind::OutOfRange, "target cube does not fit inside the rescaled unit ball");
  VectorField3 out(target);
  for (std::size_t node = 0; node < target.node_count(); ++node)
    out.set(node, field::interpolate(u, (1.0 / lambda) * target.position(node) + zero));
  return out;
}

}  // namespace gllab::ball

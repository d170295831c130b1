#include "gllab/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Dense>

#include "gllab/error.hpp"
#include "gllab/kernels.hpp"

namespace gllab::diag {

namespace {

constexpr double kFourPi = 4.0 * std::numbers::pi;

double frob2(const Mat3& J) {
  double s = 0.0;
  for (const auto& row : J)
    for (double x : row) s += x * x;
  return s;
}

Vec3 radial_derivative(const Mat3& J, const Vec3& n) { return mat_vec(J, n); }

struct RadialNode {
  double s;
  double w;
  std::size_t interval;  // index into the breakpoint list: s in (b[interval], b[interval + 1])
};

// Composite 3-point Gauss-Legendre on each [b_i, b_{i+1}], panels no wider
// than panel_width.
std::vector<RadialNode> radial_nodes(const std::vector<double>& breaks, double panel_width) {
  static const double x3 = std::sqrt(3.0 / 5.0);
  static const double gx[3] = {-x3, 0.0, x3};
  static const double gw[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  std::vector<RadialNode> out;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double a = breaks[i], b = breaks[i + 1];
    if (!(b > a)) continue;
    const int panels = std::max(1, static_cast<int>(std::ceil((b - a) / panel_width - 1e-9)));
    const double width = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
      const double lo = a + p * width;
      const double mid = lo + 0.5 * width;
      for (int g = 0; g < 3; ++g) out.push_back({mid + 0.5 * width * gx[g], 0.5 * width * gw[g], i});
    }
  }
  return out;
}

void check_ball_inside(const Grid3& g, const Vec3& x0, double R) {
  const double L = g.half_width();
  for (std::size_t a = 0; a < 3; ++a)
    if (std::abs(x0[a] - g.center()[a]) + R > L * (1.0 + 1e-12))
      throw Error(ErrorKind::OutOfRange, "ball is not contained in the grid cube");
}

std::vector<double> sorted_radii(const std::vector<double>& radii) {
  if (radii.empty()) throw Error(ErrorKind::InvalidParameter, "radius list is empty");
  std::vector<double> r = radii;
  for (double x : r)
    if (!(x > 0.0)) throw Error(ErrorKind::InvalidParameter, "radii must be positive");
  if (!std::is_sorted(r.begin(), r.end()) || std::adjacent_find(r.begin(), r.end()) != r.end())
    throw Error(ErrorKind::InvalidParameter, "radii must be strictly increasing");
  return r;
}

// Sphere integrals over the shell |x - x0| = s (per unit solid angle,
// i.e. without the s^2 factor).
struct ShellSums {
  double energy = 0.0;       // e_lambda(u)
  double radial_sq = 0.0;    // |du/d rho|^2
  double defect_sq = 0.0;    // (1 - |u|^2)^2
};

std::vector<ShellSums> shell_sums(const VectorField3& u, double lambda, const Vec3& x0,
                                  const std::vector<RadialNode>& nodes, const SphereMesh& mesh) {
  std::vector<ShellSums> out(nodes.size());
  const double quarter_l2 = 0.25 * lambda * lambda;
  const std::ptrdiff_t nn = static_cast<std::ptrdiff_t>(nodes.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t q = 0; q < nn; ++q) {
    const double s = nodes[static_cast<std::size_t>(q)].s;
    kernels::CompensatedSum e, r, d;
    for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
      const Vec3& sigma = mesh.vertices[v];
      const FieldSample fs = field::sample(u, x0 + s * sigma);
      const double w = 1.0 - norm2(fs.value);
      const double rad = norm2(radial_derivative(fs.jacobian, sigma));
      const double wt = mesh.vertex_weights[v];
      e.add(wt * (0.5 * frob2(fs.jacobian) + quarter_l2 * w * w));
      r.add(wt * rad);
      d.add(wt * w * w);
    }
    out[static_cast<std::size_t>(q)] = {e.value(), r.value(), d.value()};
  }
  return out;
}

double panel_width(const VectorField3& u, const Quadrature& q) {
  if (!(q.panel_over_h > 0.0)) throw Error(ErrorKind::InvalidParameter, "panel width must be positive");
  return q.panel_over_h * u.grid().h();
}

}  // namespace

DegreeResult degree_of_trace(const std::vector<Vec3>& trace, const SphereMesh& mesh) {
  if (trace.size() != mesh.vertices.size()) throw Error(ErrorKind::InvalidParameter, "trace does not match mesh");
  DegreeResult d;
  d.min_modulus = std::numeric_limits<double>::infinity();
  std::vector<Vec3> w(trace.size());
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const double m = norm(trace[i]);
    d.min_modulus = std::min(d.min_modulus, m);
    w[i] = m > 0.0 ? (1.0 / m) * trace[i] : Vec3{0.0, 0.0, 0.0};
  }
  if (!(d.min_modulus > 1e-12)) throw Error(ErrorKind::DegreeUndefined, "field vanishes on the sphere");
  kernels::CompensatedSum total;
  for (const auto& t : mesh.triangles)
    total.add(signed_solid_angle(w[static_cast<std::size_t>(t[0])], w[static_cast<std::size_t>(t[1])],
                                 w[static_cast<std::size_t>(t[2])]));
  d.raw = total.value() / kFourPi;
  d.degree = static_cast<int>(std::lround(d.raw));
  d.rounding_gap = std::abs(d.raw - d.degree);
  if (d.rounding_gap > 0.1) throw Error(ErrorKind::MeshTooCoarse, "degree rounding gap exceeds 0.1");
  return d;
}

DegreeResult degree_on_sphere(const VectorField3& u, double R, const SphereMesh& mesh) {
  return degree_of_trace(field::sample_on_sphere(u, R, mesh), mesh);
}

bool MonotonicityReport::nondecreasing_within_residual() const {
  for (std::size_t i = 0; i + 1 < scaled_energies.size(); ++i)
    if (scaled_energies[i + 1] < scaled_energies[i] - residuals[i]) return false;
  return true;
}

MonotonicityReport monotonicity_probe(const VectorField3& u, double lambda, const Vec3& x0,
                                      const std::vector<double>& radii, const Quadrature& q) {
  const std::vector<double> r = sorted_radii(radii);
  check_ball_inside(u.grid(), x0, r.back());
  const SphereMesh mesh = SphereMesh::icosphere(q.mesh_level);

  std::vector<double> breaks{0.0};
  breaks.insert(breaks.end(), r.begin(), r.end());
  const auto nodes = radial_nodes(breaks, panel_width(u, q));
  const auto sums = shell_sums(u, lambda, x0, nodes, mesh);

  MonotonicityReport rep;
  rep.x0 = x0;
  rep.radii = r;
  // Energy inside each radius: nodes in intervals [0, r_i] are intervals 0..i.
  for (std::size_t i = 0; i < r.size(); ++i) {
    kernels::CompensatedSum e;
    for (std::size_t k = 0; k < nodes.size(); ++k)
      if (nodes[k].interval <= i) e.add(nodes[k].w * nodes[k].s * nodes[k].s * sums[k].energy);
    rep.scaled_energies.push_back(e.value() / r[i]);
  }
  for (std::size_t i = 0; i + 1 < r.size(); ++i) {
    const double lo = r[i], hi = r[i + 1];
    kernels::CompensatedSum rad, pot;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      const double s = nodes[k].s;
      if (nodes[k].interval == i + 1) rad.add(nodes[k].w * s * sums[k].radial_sq);
      if (nodes[k].interval <= i + 1)
        pot.add(nodes[k].w * s * s * sums[k].defect_sq * (1.0 / std::max(lo, s) - 1.0 / hi));
    }
    const double potential = 0.5 * lambda * lambda * pot.value();
    rep.radial_terms.push_back(rad.value());
    rep.potential_terms.push_back(potential);
    rep.residuals.push_back(
        std::abs(rep.scaled_energies[i + 1] - rep.scaled_energies[i] - rad.value() - potential));
  }
  return rep;
}

Curve potential_decay_probe(const VectorField3& u, const std::vector<double>& radii, const Quadrature& q) {
  const std::vector<double> r = sorted_radii(radii);
  const Vec3 c = u.grid().center();
  check_ball_inside(u.grid(), c, r.back());
  const SphereMesh mesh = SphereMesh::icosphere(q.mesh_level);
  std::vector<double> breaks{0.0};
  breaks.insert(breaks.end(), r.begin(), r.end());
  const auto nodes = radial_nodes(breaks, panel_width(u, q));
  const auto sums = shell_sums(u, 0.0, c, nodes, mesh);
  Curve out;
  for (std::size_t i = 0; i < r.size(); ++i) {
    kernels::CompensatedSum s;
    for (std::size_t k = 0; k < nodes.size(); ++k)
      if (nodes[k].interval <= i) s.add(nodes[k].w * nodes[k].s * nodes[k].s * 0.25 * sums[k].defect_sq);
    out.emplace_back(r[i], s.value() / r[i]);
  }
  return out;
}

std::vector<ShellDecay> shell_decay_probe(const VectorField3& u, const std::vector<double>& radii,
                                          const SphereMesh& mesh) {
  std::vector<ShellDecay> out;
  const Vec3 c = u.grid().center();
  for (double r : radii) {
    check_ball_inside(u.grid(), c, r);
    ShellDecay d{r, 0.0, 0.0};
    for (const Vec3& sigma : mesh.vertices) {
      const FieldSample fs = field::sample(u, c + r * sigma);
      d.modulus_term = std::max(d.modulus_term, r * r * (1.0 - norm2(fs.value)));
      d.gradient_term = std::max(d.gradient_term, r * std::sqrt(frob2(fs.jacobian)));
    }
    out.push_back(d);
  }
  return out;
}

double fitted_exponent(const Curve& c) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (const auto& [x, y] : c) {
    if (!(x > 0.0 && y > 0.0)) continue;
    const double lx = std::log(x), ly = std::log(y);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 2) return 0.0;
  const double den = n * sxx - sx * sx;
  return den == 0.0 ? 0.0 : (n * sxy - sx * sy) / den;
}

RadialDecay radial_derivative_decay(const VectorField3& u, const std::vector<double>& radii,
                                    std::optional<double> r_out, const Quadrature& q) {
  const std::vector<double> r = sorted_radii(radii);
  const Grid3& g = u.grid();
  const double outer = r_out.value_or(g.half_width() - g.h());
  if (!(outer > r.back())) throw Error(ErrorKind::InvalidParameter, "R_out must exceed every radius");
  check_ball_inside(g, g.center(), outer);
  const SphereMesh mesh = SphereMesh::icosphere(q.mesh_level);
  std::vector<double> breaks = r;
  breaks.push_back(outer);
  const auto nodes = radial_nodes(breaks, panel_width(u, q));
  const auto sums = shell_sums(u, 0.0, g.center(), nodes, mesh);
  RadialDecay rep;
  rep.r_out = outer;
  for (std::size_t i = 0; i < r.size(); ++i) {
    kernels::CompensatedSum s;
    for (std::size_t k = 0; k < nodes.size(); ++k)
      if (nodes[k].interval >= i) s.add(nodes[k].w * nodes[k].s * sums[k].radial_sq);
    rep.tails.emplace_back(r[i], s.value());
  }
  rep.fitted_exponent = fitted_exponent(rep.tails);
  return rep;
}

BlowdownReport align_trace(std::vector<Vec3> trace, const SphereMesh& mesh) {
  if (trace.size() != mesh.vertices.size()) throw Error(ErrorKind::InvalidParameter, "trace does not match mesh");
  Eigen::Matrix3d M = Eigen::Matrix3d::Zero();
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const Eigen::Vector3d a(trace[i][0], trace[i][1], trace[i][2]);
    const Eigen::Vector3d s(mesh.vertices[i][0], mesh.vertices[i][1], mesh.vertices[i][2]);
    M += mesh.vertex_weights[i] * a * s.transpose();
  }
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::Matrix3d U = svd.matrixU(), V = svd.matrixV();
  const Eigen::Vector3d sv = svd.singularValues();
  const double d = (U * V.transpose()).determinant() > 0.0 ? 1.0 : -1.0;

  auto residual = [&](const Eigen::Matrix3d& T) {
    kernels::CompensatedSum s;
    for (std::size_t i = 0; i < trace.size(); ++i) {
      const Eigen::Vector3d a(trace[i][0], trace[i][1], trace[i][2]);
      const Eigen::Vector3d sg(mesh.vertices[i][0], mesh.vertices[i][1], mesh.vertices[i][2]);
      s.add(mesh.vertex_weights[i] * (a - T * sg).squaredNorm());
    }
    return s.value();
  };
  // Best element of each connected component of O(3).
  const Eigen::Matrix3d T_same = U * Eigen::Vector3d(1.0, 1.0, d).asDiagonal() * V.transpose();
  const Eigen::Matrix3d T_flip = U * Eigen::Vector3d(1.0, 1.0, -d).asDiagonal() * V.transpose();
  const Eigen::Matrix3d& T_proper = d > 0 ? T_same : T_flip;
  const Eigen::Matrix3d& T_improper = d > 0 ? T_flip : T_same;

  BlowdownReport rep;
  rep.proper_residual = residual(T_proper);
  rep.improper_residual = residual(T_improper);
  const bool proper = rep.proper_residual <= rep.improper_residual;
  const Eigen::Matrix3d& T = proper ? T_proper : T_improper;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) rep.best_T[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = T(i, j);
  rep.det_T = T.determinant();
  rep.l2_distance = std::sqrt(std::min(rep.proper_residual, rep.improper_residual));
  rep.alignment_ambiguous = !(sv(2) > 1e-10 * sv(0));
  for (std::size_t i = 0; i < trace.size(); ++i)
    rep.sup_distance = std::max(rep.sup_distance, norm(trace[i] - mat_vec(rep.best_T, mesh.vertices[i])));
  rep.trace = std::move(trace);
  return rep;
}

BlowdownReport blowdown(const VectorField3& u, double R, const SphereMesh& mesh) {
  std::vector<Vec3> trace = field::sample_on_sphere(u, R, mesh);
  const DegreeResult deg = degree_of_trace(trace, mesh);
  BlowdownReport rep = align_trace(std::move(trace), mesh);
  rep.R = R;
  rep.degree = deg.degree;
  rep.degree_raw = deg.raw;
  return rep;
}

Curve quantization_probe(const VectorField3& u, double lambda, const std::vector<double>& radii,
                         const Quadrature& q) {
  const std::vector<double> r = sorted_radii(radii);
  const Vec3 c = u.grid().center();
  check_ball_inside(u.grid(), c, r.back());
  const SphereMesh mesh = SphereMesh::icosphere(q.mesh_level);
  std::vector<double> breaks{0.0};
  breaks.insert(breaks.end(), r.begin(), r.end());
  const auto nodes = radial_nodes(breaks, panel_width(u, q));
  const auto sums = shell_sums(u, lambda, c, nodes, mesh);
  Curve out;
  for (std::size_t i = 0; i < r.size(); ++i) {
    kernels::CompensatedSum s;
    for (std::size_t k = 0; k < nodes.size(); ++k)
      if (nodes[k].interval <= i) s.add(nodes[k].w * nodes[k].s * nodes[k].s * sums[k].energy);
    out.emplace_back(r[i], s.value() / r[i]);
  }
  return out;
}

bool nondecreasing(const Curve& c, double tolerance) {
  for (std::size_t i = 0; i + 1 < c.size(); ++i)
    if (c[i + 1].second < c[i].second - tolerance) return false;
  return true;
}

VectorField3 division_map(const VectorField3& u, const radial::RadialProfile& p, bool* extrapolated) {
  const Grid3& g = u.grid();
  VectorField3 v(g);
  bool extra = false;
  for (std::size_t node = 0; node < g.node_count(); ++node) {
    const double r = norm(g.position(node) - g.center());
    if (r == 0.0) continue;
    const radial::ProfileSample s = radial::evaluate_profile(p, r);
    extra = extra || s.extrapolated;
    v.set(node, (1.0 / s.f) * u.at(node));
    v.set_frozen(node, u.frozen(node));
  }
  if (extrapolated) *extrapolated = extra;
  return v;
}

double flux_density(const Vec3& x, const Vec3& v, const Mat3& jac_v, double f) {
  const double r = norm(x);
  const Vec3 n = (1.0 / r) * x;
  const double w = 1.0 - norm2(v);
  return 0.5 * frob2(jac_v) - norm2(radial_derivative(jac_v, n)) + 0.25 * f * f * w * w + w / (r * r);
}

SymmetryReport symmetry_defect(const VectorField3& u, const radial::RadialProfile& p, double r_in, double r_out,
                               const Quadrature& q) {
  if (!(r_in > 0.0 && r_out > r_in)) throw Error(ErrorKind::InvalidParameter, "annulus needs 0 < r_in < r_out");
  const Grid3& g = u.grid();
  const Vec3 c = g.center();
  check_ball_inside(g, c, r_out);
  SymmetryReport rep;
  rep.r_in = r_in;
  rep.r_out = r_out;
  const VectorField3 v = division_map(u, p, &rep.extrapolated);
  const SphereMesh mesh = SphereMesh::icosphere(q.mesh_level);

  for (std::size_t k = 0; k < g.node_count(); ++k) {
    const double r = norm(g.position(k) - c);
    if (r >= r_in && r <= r_out && norm(u.at(k)) == 0.0)
      throw Error(ErrorKind::InvalidParameter, "u vanishes on the annulus");
  }

  auto nodes = radial_nodes({r_in, r_out}, panel_width(u, q));
  nodes.push_back({r_in, 0.0, 0});
  nodes.push_back({r_out, 0.0, 0});
  std::vector<double> radial(nodes.size()), flux(nodes.size()), sup(nodes.size());
  const std::ptrdiff_t nn = static_cast<std::ptrdiff_t>(nodes.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t qi = 0; qi < nn; ++qi) {
    const double s = nodes[static_cast<std::size_t>(qi)].s;
    const radial::ProfileSample fs = radial::evaluate_profile(p, s);
    kernels::CompensatedSum rad, fl;
    double worst = 0.0;
    for (std::size_t vi = 0; vi < mesh.vertices.size(); ++vi) {
      const Vec3& sigma = mesh.vertices[vi];
      const FieldSample smp = field::sample(v, c + s * sigma);
      worst = std::max(worst, std::abs(norm(smp.value) - 1.0));
      rad.add(mesh.vertex_weights[vi] * norm2(radial_derivative(smp.jacobian, sigma)));
      fl.add(mesh.vertex_weights[vi] * flux_density(s * sigma, smp.value, smp.jacobian, fs.f));
    }
    radial[static_cast<std::size_t>(qi)] = rad.value();
    flux[static_cast<std::size_t>(qi)] = fl.value() * s * s;
    sup[static_cast<std::size_t>(qi)] = worst;
  }
  kernels::CompensatedSum rd;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    rd.add(nodes[k].w * nodes[k].s * radial[k]);
    rep.modulus_defect = std::max(rep.modulus_defect, sup[k]);
  }
  rep.radial_defect = rd.value();
  rep.flux_in = flux[nodes.size() - 2];
  rep.flux_out = flux[nodes.size() - 1];
  if (radial::evaluate_profile(p, r_out).extrapolated) rep.extrapolated = true;
  return rep;
}

}  // namespace gllab::diag

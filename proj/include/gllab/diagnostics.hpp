#pragma once

// Numerical probes of the analytic identities satisfied by Ginzburg-Landau
// solutions: degree, monotonicity of the scaled energy, potential and
// radial-derivative decay, blow-down tangent maps, energy quantization and
// the division-map symmetry defects.
//
// Ball, shell and annulus integrals never use node masks.  They are radial
// composite Gauss-Legendre integrals of sphere integrals, the latter taken
// with icosphere vertex-area weights on trilinearly sampled data.

#include <optional>
#include <utility>
#include <vector>

#include "gllab/field.hpp"
#include "gllab/grid.hpp"
#include "gllab/radial_profile.hpp"
#include "gllab/sphere_mesh.hpp"

namespace gllab::diag {

inline constexpr int kDefaultMeshLevel = 4;

struct DegreeResult {
  int degree = 0;
  double raw = 0.0;  // (1/4 pi) sum of signed solid angles
  double rounding_gap = 0.0;
  double min_modulus = 0.0;
};

/// Degree of u/|u| on the sphere of radius R about the grid center.
DegreeResult degree_on_sphere(const VectorField3& u, double R, const SphereMesh& mesh);
/// Same, on an already sampled sphere trace.
DegreeResult degree_of_trace(const std::vector<Vec3>& trace, const SphereMesh& mesh);

/// Quadrature controls for ball and shell integrals.
struct Quadrature {
  int mesh_level = kDefaultMeshLevel;
  // Radial panel width as a multiple of the grid spacing (3 Gauss points each).
  double panel_over_h = 1.0;
};

struct MonotonicityReport {
  Vec3 x0{0.0, 0.0, 0.0};
  std::vector<double> radii;
  std::vector<double> scaled_energies;  // r^-1 E_lambda(u, B_r(x0))
  // One entry per consecutive radius pair (r_i, r_{i+1}).
  std::vector<double> radial_terms;     // int_{annulus} |du/d rho|^2 / rho
  std::vector<double> potential_terms;  // (lambda^2/2) int_r^R t^-2 int_{B_t} (1-|u|^2)^2
  std::vector<double> residuals;        // |LHS - RHS|

  /// Nondecreasing scaled energies, allowing a drop of at most the pair residual.
  bool nondecreasing_within_residual() const;
};

MonotonicityReport monotonicity_probe(const VectorField3& u, double lambda, const Vec3& x0,
                                      const std::vector<double>& radii, const Quadrature& q = {});

using Curve = std::vector<std::pair<double, double>>;

/// (R, R^-1 int_{B_R} (1 - |u|^2)^2 / 4) about the grid center.
Curve potential_decay_probe(const VectorField3& u, const std::vector<double>& radii, const Quadrature& q = {});

struct ShellDecay {
  double r = 0.0;
  double modulus_term = 0.0;   // sup r^2 (1 - |u|^2)
  double gradient_term = 0.0;  // sup r |grad u|
};
std::vector<ShellDecay> shell_decay_probe(const VectorField3& u, const std::vector<double>& radii,
                                          const SphereMesh& mesh);

struct RadialDecay {
  Curve tails;  // (R, int_{R < |x| < R_out} |du/dr|^2 / |x|)
  double r_out = 0.0;
  double fitted_exponent = 0.0;  // slope of log(tail) against log(R)
};
/// R_out defaults to L - h.
RadialDecay radial_derivative_decay(const VectorField3& u, const std::vector<double>& radii,
                                    std::optional<double> r_out = std::nullopt, const Quadrature& q = {});

struct BlowdownReport {
  double R = 0.0;
  std::vector<Vec3> trace;
  Mat3 best_T = kIdentity3;
  double l2_distance = 0.0;
  double sup_distance = 0.0;
  int degree = 0;
  double degree_raw = 0.0;
  double det_T = 1.0;
  bool alignment_ambiguous = false;
  // Residuals of the best rotation and the best reflection.
  double proper_residual = 0.0;
  double improper_residual = 0.0;
};

BlowdownReport blowdown(const VectorField3& u, double R, const SphereMesh& mesh);
/// Weighted orthogonal Procrustes fit of trace_i ~ T sigma_i over O(3).
BlowdownReport align_trace(std::vector<Vec3> trace, const SphereMesh& mesh);

/// (R, R^-1 E_lambda(u, B_R)) about the grid center.
Curve quantization_probe(const VectorField3& u, double lambda, const std::vector<double>& radii,
                         const Quadrature& q = {});
bool nondecreasing(const Curve& c, double tolerance);

struct SymmetryReport {
  double r_in = 0.0;
  double r_out = 0.0;
  double modulus_defect = 0.0;  // sup over the annulus of ||v| - 1|
  double radial_defect = 0.0;   // int_{annulus} |dv/dr|^2 / |x|
  double flux_in = 0.0;         // int_{|x| = r_in} Phi . n
  double flux_out = 0.0;
  bool extrapolated = false;    // f was evaluated beyond the profile range
};

/// Division map v = u / f(|x|) about the grid center.
SymmetryReport symmetry_defect(const VectorField3& u, const radial::RadialProfile& p, double r_in, double r_out,
                               const Quadrature& q = {});
/// Node-wise v = u / f(|x|); the center node is set to 0.
VectorField3 division_map(const VectorField3& u, const radial::RadialProfile& p, bool* extrapolated = nullptr);

/// Flux density Phi . x/|x| of the division-map divergence identity.
double flux_density(const Vec3& x, const Vec3& v, const Mat3& jac_v, double f);

/// Fitted log-log slope of a positive curve.
double fitted_exponent(const Curve& c);

}  // namespace gllab::diag

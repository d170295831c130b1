#pragma once

// Minimization of E_lambda over fields equal to the identity on the unit
// sphere.  The whole exterior shell |x| >= 1 of the cube [-(1+2h), 1+2h]^3 is
// frozen to x/|x|, so every free node has a full 7-point stencil.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gllab/field.hpp"
#include "gllab/grid.hpp"
#include "gllab/radial_profile.hpp"

namespace gllab::ball {

enum class Init { IdentityExtension, Hedgehog, RandomPerturbed };

Init parse_init(const std::string& name);
std::string to_string(Init init);

struct BallProblem {
  double lambda = 10.0;
  int n = 65;  // odd, so the origin is a node
  Init init = Init::Hedgehog;
  double perturbation = 0.05;  // amplitude for RandomPerturbed
  std::uint64_t seed = 1;
  double grad_tol = 1e-6;  // stop when sup |grad| <= grad_tol * h^3
  int max_iterations = 50000;
  double armijo = 1e-4;
  bool project_unit_ball = true;

  /// h = 2 / (n - 5), so that L = h (n - 1) / 2 = 1 + 2h.
  double spacing() const;
  Grid3 grid() const;
  /// h <= 0.5 / lambda.
  bool resolves_core() const;
};

struct TraceRow {
  int iter = 0;
  double energy = 0.0;
  double grad_norm = 0.0;  // sup norm of the gradient
  double step = 0.0;
};

struct MinimizeResult {
  VectorField3 field;
  EnergyReport energy;       // over B_1 (node mask)
  EnergyReport cube_energy;  // the objective
  std::vector<TraceRow> trace;
  double initial_energy = 0.0;
  double max_norm_seen = 0.0;
  int iterations = 0;
  bool converged = false;
  bool resolution_warning = false;
  bool stalled = false;  // line search could not decrease the energy
};

struct DescentOptions {
  double grad_tol = 1e-6;
  int max_iterations = 50000;
  double armijo = 1e-4;
  bool project_unit_ball = true;
};

VectorField3 initial_field(const BallProblem& p, const radial::RadialProfile& profile);

/// Projected Barzilai-Borwein descent with monotone backtracking.  Frozen
/// nodes are left untouched.
MinimizeResult descend(VectorField3 u, double lambda, const DescentOptions& opt);

MinimizeResult minimize(const BallProblem& p, const radial::RadialProfile& profile);

struct VorticityReport {
  double delta = 0.0;
  std::vector<std::size_t> cells;  // node indices with |u| <= delta
  double diameter = 0.0;
  double max_dist_origin = 0.0;
  Vec3 zero_estimate{0.0, 0.0, 0.0};
  double min_modulus = 0.0;
  std::size_t min_node = 0;
  // sqrt of (fitted minimum of |u|^2, clipped at 0) + max misfit of the fit.
  double fit_residual = 0.0;
  bool subgrid_fit = false;
};

VorticityReport vorticity(const VectorField3& u, double delta);

/// x -> u(x / lambda + zero) resampled trilinearly on target.  The target
/// cube side must not exceed lambda (1 - |zero|).
VectorField3 recenter_rescale(const VectorField3& u, double lambda, const Vec3& zero, const Grid3& target);

}  // namespace gllab::ball

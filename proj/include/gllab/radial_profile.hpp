#pragma once

// Radial profile f of the equivariant Ginzburg-Landau solution
//   f'' + (2/r) f' - (2/r^2) f + f (1 - f^2) = 0,  f(0) = 0,  f(inf) = 1,
// obtained by shooting on the initial slope f'(0) and marching restarts for
// the far field, where the linearization about f = 1 grows like exp(sqrt(2) r).
// Below r = 0.25 the profile comes from its odd power series.

#include <iosfwd>
#include <string>
#include <vector>

namespace gllab::radial {

inline constexpr double kOvershootMargin = 1e-6;
inline constexpr double kUndershootSlope = -1e-9;
inline constexpr double kDivergenceBound = 2.0;

inline constexpr double kDefaultRMax = 200.0;
inline constexpr double kDefaultStep = 1e-3;
inline constexpr double kDefaultTol = 1e-10;

enum class ShotOutcome {
  Bounded,     // reached r_max with no event
  Overshoot,   // f > 1 + margin
  Undershoot,  // f' < 0 before reaching 1
  Diverged,    // left [-2, 2]
};

/// Result of one RK4 integration from the origin with no boundary condition.
struct ProfileCandidate {
  std::vector<double> r;
  std::vector<double> f;
  std::vector<double> df;
  double slope = 0.0;
  double step = 0.0;
  ShotOutcome outcome = ShotOutcome::Bounded;
  // r at which the first overshoot / undershoot event was seen (or r_max).
  double event_r = 0.0;
  bool overshoot = false;
  bool undershoot = false;
  bool diverged = false;
};

struct RadialProfile {
  std::vector<double> r_grid;
  std::vector<double> f_values;
  std::vector<double> df_values;
  double slope = 0.0;
  double r_max = 0.0;
  double step = 0.0;
  double tol = 0.0;
  // Number of marching restarts needed to reach r_max.
  int segments = 0;
};

struct ProfileSample {
  double f = 0.0;
  double df = 0.0;
  bool extrapolated = false;
};

/// Two-term series f = a r - (a/10) r^3 and its derivative, valid as r -> 0.
ProfileSample series_near_origin(double slope, double r);

/// Integrates the ODE from the origin with the given slope.  Stops at the
/// first divergence (f outside [-2, 2]); overshoot/undershoot are flagged but
/// integration continues until divergence or r_max.
ProfileCandidate integrate_ode(double slope, double r_max, double step);

/// Bounded profile by bisection on the slope, bracket [1e-3, 10].
RadialProfile solve_profile(double r_max = kDefaultRMax, double tol = kDefaultTol,
                            double step = kDefaultStep);

/// (1/R) int_0^R [ r^2 f'^2 / 2 + f^2 + r^2 (1 - f^2)^2 / 4 ] dr, trapezoid on r_grid.
double profile_energy_average(const RadialProfile& p, double R);

/// (1/R) E(U, B_R) for the hedgehog U = f(|x|) x/|x|, as a radial integral.
double hedgehog_scaled_energy(const RadialProfile& p, double R);

/// f and f' at r.  Hermite cubic (Fritsch-Carlson limited) for f, linear
/// for f'.  Beyond r_max the far field 1 - 1/r^2 is used and flagged.
ProfileSample evaluate_profile(const RadialProfile& p, double r);

/// Profile export: CSV `r,f,df` and JSON sidecar {slope, r_max, step, tol}.
void write_profile_csv(const RadialProfile& p, std::ostream& os);
std::string profile_sidecar_json(const RadialProfile& p);

}  // namespace gllab::radial

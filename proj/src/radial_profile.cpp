#include "gllab/radial_profile.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

#include "json.hpp"

#include "gllab/error.hpp"

namespace gllab::radial {

namespace {

struct State {
  double f;
  double g;  // f'
};

// Right-hand side of the first-order system (f, f')' at r > 0.
inline State rhs(double r, State s) {
  const double inv_r = 1.0 / r;
  return {s.g, -2.0 * inv_r * s.g + 2.0 * inv_r * inv_r * s.f - s.f * (1.0 - s.f * s.f)};
}

inline State rk4_step(double r, State s, double h) {
  const State k1 = rhs(r, s);
  const State k2 = rhs(r + 0.5 * h, {s.f + 0.5 * h * k1.f, s.g + 0.5 * h * k1.g});
  const State k3 = rhs(r + 0.5 * h, {s.f + 0.5 * h * k2.f, s.g + 0.5 * h * k2.g});
  const State k4 = rhs(r + h, {s.f + h * k3.f, s.g + h * k3.g});
  return {s.f + h / 6.0 * (k1.f + 2.0 * k2.f + 2.0 * k3.f + k4.f),
          s.g + h / 6.0 * (k1.g + 2.0 * k2.g + 2.0 * k3.g + k4.g)};
}

std::size_t steps_for(double r_max, double step) {
  return static_cast<std::size_t>(std::llround(r_max / step));
}

// One shot on the uniform grid r_i = i * step starting from grid index
// `start` with state s0.  The trajectory is appended to f/g (index start
// first) and the returned outcome classifies the shot for bisection.
struct Shot {
  ShotOutcome outcome = ShotOutcome::Bounded;
  bool over = false;  // bisection side: true means the slope is too large
  std::vector<double> f;
  std::vector<double> g;
};

void classify_shot(std::size_t start, State s0, std::size_t n_steps, double step, double r_max,
                   Shot& shot) {
  shot.f.clear();
  shot.g.clear();
  shot.f.push_back(s0.f);
  shot.g.push_back(s0.g);
  State s = s0;
  for (std::size_t i = start; i < n_steps; ++i) {
    s = rk4_step(static_cast<double>(i) * step, s, step);
    shot.f.push_back(s.f);
    shot.g.push_back(s.g);
    if (s.f > 1.0 + kOvershootMargin) {
      shot.outcome = ShotOutcome::Overshoot;
      shot.over = true;
      return;
    }
    if (s.g < kUndershootSlope) {
      shot.outcome = ShotOutcome::Undershoot;
      shot.over = false;
      return;
    }
    if (!(std::abs(s.f) <= kDivergenceBound)) {
      shot.outcome = ShotOutcome::Diverged;
      shot.over = s.f > 0.0;
      return;
    }
  }
  // Far-field matching: the bounded solution has 1 - f ~ 1/r^2.
  shot.outcome = ShotOutcome::Bounded;
  shot.over = s.f > 1.0 - 1.0 / (r_max * r_max);
}

// Odd power series f = sum_m c_m r^(2m+1), c_0 = slope.  Matching powers in
// the ODE gives c_m (2m)(2m+3) = -c_(m-1) + [f^3]_(2m-1).
constexpr int kSeriesTerms = 12;
constexpr double kSeriesRadius = 0.25;

std::array<double, kSeriesTerms> series_coefficients(double slope) {
  std::array<double, kSeriesTerms> c{};
  c[0] = slope;
  for (int m = 1; m < kSeriesTerms; ++m) {
    double cube = 0.0;  // coefficient of r^(2(m-2)+3) in f^3
    for (int i = 0; i <= m - 2; ++i)
      for (int j = 0; i + j <= m - 2; ++j) cube += c[i] * c[j] * c[m - 2 - i - j];
    c[m] = (-c[m - 1] + cube) / ((2.0 * m) * (2.0 * m + 3.0));
  }
  return c;
}

State series_state(const std::array<double, kSeriesTerms>& c, double r) {
  const double r2 = r * r;
  double f = 0.0, g = 0.0, p = 1.0;
  for (int m = 0; m < kSeriesTerms; ++m, p *= r2) {
    f += c[m] * p * r;
    g += (2.0 * m + 1.0) * c[m] * p;
  }
  return {f, g};
}

// RK4 starts at this grid index; the series covers everything below it, away
// from the 1/r singularity that degrades RK4 to second order.
std::size_t series_index(double step, std::size_t n_steps) {
  const auto k = static_cast<std::size_t>(std::max<long long>(1, std::llround(kSeriesRadius / step)));
  return std::min(k, n_steps > 1 ? n_steps - 1 : std::size_t{1});
}

State origin_state(double slope, double step, std::size_t index) {
  return series_state(series_coefficients(slope), static_cast<double>(index) * step);
}
}  // namespace

ProfileSample series_near_origin(double slope, double r) {
  return {slope * r - slope / 10.0 * r * r * r, slope - 3.0 * slope / 10.0 * r * r, false};
}

ProfileCandidate integrate_ode(double slope, double r_max, double step) {
  if (!(slope > 0.0)) throw Error(ErrorKind::InvalidParameter, "slope must be positive");
  if (!(step > 0.0) || !(r_max > 0.0))
    throw Error(ErrorKind::InvalidParameter, "step and r_max must be positive");
  if (!(step < r_max / 100.0))
    throw Error(ErrorKind::InvalidParameter, "step must be below r_max/100");

  const std::size_t n_steps = steps_for(r_max, step);
  ProfileCandidate c;
  c.slope = slope;
  c.step = step;
  c.event_r = r_max;
  c.r.reserve(n_steps + 1);
  c.f.reserve(n_steps + 1);
  c.df.reserve(n_steps + 1);
  c.r.push_back(0.0);
  c.f.push_back(0.0);
  c.df.push_back(slope);

  const std::size_t k0 = series_index(step, n_steps);
  const auto coeffs = series_coefficients(slope);
  State s{};
  for (std::size_t i = 1; i <= k0; ++i) {
    s = series_state(coeffs, static_cast<double>(i) * step);
    c.r.push_back(static_cast<double>(i) * step);
    c.f.push_back(s.f);
    c.df.push_back(s.g);
  }
  for (std::size_t i = k0; i < n_steps; ++i) {
    s = rk4_step(static_cast<double>(i) * step, s, step);
    const double r = static_cast<double>(i + 1) * step;
    c.r.push_back(r);
    c.f.push_back(s.f);
    c.df.push_back(s.g);
    if (!c.overshoot && !c.undershoot) {
      if (s.f > 1.0 + kOvershootMargin) {
        c.overshoot = true;
        c.event_r = r;
      } else if (s.g < kUndershootSlope) {
        c.undershoot = true;
        c.event_r = r;
      }
    }
    if (!(std::abs(s.f) <= kDivergenceBound)) {
      c.diverged = true;
      if (!c.overshoot && !c.undershoot) c.event_r = r;
      break;
    }
  }
  if (c.overshoot) c.outcome = ShotOutcome::Overshoot;
  else if (c.undershoot) c.outcome = ShotOutcome::Undershoot;
  else if (c.diverged) c.outcome = ShotOutcome::Diverged;
  return c;
}

RadialProfile solve_profile(double r_max, double tol, double step) {
  if (!(r_max >= 50.0)) throw Error(ErrorKind::InvalidParameter, "r_max must be >= 50");
  if (!(tol > 0.0 && tol <= 1e-8)) throw Error(ErrorKind::InvalidParameter, "tol must lie in (0, 1e-8]");
  if (!(step > 0.0 && step < r_max / 100.0))
    throw Error(ErrorKind::InvalidParameter, "step must lie in (0, r_max/100)");

  const std::size_t n_steps = steps_for(r_max, step);
  RadialProfile p;
  p.r_max = static_cast<double>(n_steps) * step;
  p.step = step;
  p.tol = tol;
  p.r_grid.resize(n_steps + 1);
  for (std::size_t i = 0; i <= n_steps; ++i) p.r_grid[i] = static_cast<double>(i) * step;
  p.f_values.assign(n_steps + 1, 0.0);
  p.df_values.assign(n_steps + 1, 0.0);

  Shot lo_shot, hi_shot, trial;

  // Segment 0 shoots on the slope at the origin; later segments hold f at
  // the restart radius and shoot on f' there.
  const std::size_t k0 = series_index(step, n_steps);
  std::size_t start = k0;
  double f_start = 0.0;
  bool first = true;
  double lo = 1e-3, hi = 10.0;

  auto state_for = [&](double param) {
    return first ? origin_state(param, step, k0) : State{f_start, param};
  };
  auto run = [&](double param, Shot& shot) {
    classify_shot(start, state_for(param), n_steps, step, p.r_max, shot);
  };

  while (true) {
    run(lo, lo_shot);
    run(hi, hi_shot);
    if (!first) {
      // Expand the bracket around the carried-over derivative until it
      // straddles the bounded solution.
      const double width = std::max(hi - lo, 1e-14);
      double grow = width;
      for (int k = 0; k < 80 && lo_shot.over; ++k, grow *= 2.0) {
        lo -= grow;
        run(lo, lo_shot);
      }
      grow = width;
      for (int k = 0; k < 80 && !hi_shot.over; ++k, grow *= 2.0) {
        hi += grow;
        run(hi, hi_shot);
      }
    }
    if (lo_shot.over || !hi_shot.over) {
      throw Error(ErrorKind::NumericalFailure,
                  first ? "bracket-not-found: no sign change for slope in [1e-3, 10]"
                        : "bracket-not-found while marching the far field");
    }

    // Bisect down to floating-point resolution of the parameter.
    for (int it = 0; it < 400; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (!(mid > lo && mid < hi)) break;
      run(mid, trial);
      if (trial.over) {
        hi = mid;
        std::swap(hi_shot, trial);
      } else {
        lo = mid;
        std::swap(lo_shot, trial);
      }
    }
    if (first) {
      if (hi - lo > tol) throw Error(ErrorKind::NumericalFailure, "slope bisection did not reach tol");
      p.slope = 0.5 * (lo + hi);
    }

    // The bounded solution lies between the two bracketing shots; keep the
    // stretch where they agree to tol and restart from its end.
    const std::size_t common = std::min(lo_shot.f.size(), hi_shot.f.size());
    std::size_t agree = 0;
    while (agree + 1 < common && std::abs(lo_shot.f[agree + 1] - hi_shot.f[agree + 1]) <= tol &&
           std::abs(lo_shot.g[agree + 1] - hi_shot.g[agree + 1]) <= tol) {
      ++agree;
    }
    for (std::size_t k = 0; k <= agree; ++k) {
      p.f_values[start + k] = 0.5 * (lo_shot.f[k] + hi_shot.f[k]);
      p.df_values[start + k] = 0.5 * (lo_shot.g[k] + hi_shot.g[k]);
    }
    ++p.segments;
    const std::size_t reached = start + agree;
    if (reached >= n_steps) break;
    if (agree < 16) throw Error(ErrorKind::NumericalFailure, "far-field marching stalled");

    first = false;
    start = reached;
    f_start = p.f_values[start];
    const double g_mid = p.df_values[start];
    const double half = std::max(0.5 * std::abs(hi_shot.g[agree] - lo_shot.g[agree]), 1e-14);
    lo = g_mid - half;
    hi = g_mid + half;
  }

  const auto coeffs = series_coefficients(p.slope);
  for (std::size_t i = 0; i < k0; ++i) {
    const State s = series_state(coeffs, p.r_grid[i]);
    p.f_values[i] = s.f;
    p.df_values[i] = s.g;
  }
  p.f_values[0] = 0.0;
  p.df_values[0] = p.slope;
  return p;
}

namespace {

void check_radius(const RadialProfile& p, double R) {
  if (!(R > 0.0)) throw Error(ErrorKind::InvalidParameter, "radius must be positive");
  if (R > p.r_max) throw Error(ErrorKind::OutOfRange, "radius exceeds profile r_max");
}

// Composite trapezoid of integrand(r, f, f') over [0, R] on the profile grid.
template <class Integrand>
double trapezoid_to(const RadialProfile& p, double R, Integrand&& integrand) {
  double sum = 0.0;
  std::size_t i = 0;
  double prev = integrand(p.r_grid[0], p.f_values[0], p.df_values[0]);
  while (i + 1 < p.r_grid.size() && p.r_grid[i + 1] <= R) {
    const double next = integrand(p.r_grid[i + 1], p.f_values[i + 1], p.df_values[i + 1]);
    sum += 0.5 * (p.r_grid[i + 1] - p.r_grid[i]) * (prev + next);
    prev = next;
    ++i;
  }
  if (R > p.r_grid[i]) {
    const ProfileSample s = evaluate_profile(p, R);
    sum += 0.5 * (R - p.r_grid[i]) * (prev + integrand(R, s.f, s.df));
  }
  return sum;
}

}  // namespace

double profile_energy_average(const RadialProfile& p, double R) {
  check_radius(p, R);
  const double integral = trapezoid_to(p, R, [](double r, double f, double df) {
    const double w = 1.0 - f * f;
    return 0.5 * r * r * df * df + f * f + 0.25 * r * r * w * w;
  });
  return integral / R;
}

double hedgehog_scaled_energy(const RadialProfile& p, double R) {
  check_radius(p, R);
  // r^2 [ (f'^2 + 2 f^2 / r^2) / 2 + (1 - f^2)^2 / 4 ] written without the 1/r^2.
  const double integral = trapezoid_to(p, R, [](double r, double f, double df) {
    const double w = 1.0 - f * f;
    return 0.5 * (r * r * df * df + 2.0 * f * f) + 0.25 * w * w * r * r;
  });
  return 4.0 * std::numbers::pi * integral / R;
}

ProfileSample evaluate_profile(const RadialProfile& p, double r) {
  if (!(r >= 0.0)) throw Error(ErrorKind::InvalidParameter, "radius must be non-negative");
  if (p.r_grid.size() < 2) throw Error(ErrorKind::InvalidParameter, "empty profile");
  if (r == 0.0) return {0.0, p.slope, false};
  if (r > p.r_max) {
    return {1.0 - 1.0 / (r * r), 2.0 / (r * r * r), true};
  }
  if (r < p.r_grid[1]) return series_near_origin(p.slope, r);

  auto it = std::upper_bound(p.r_grid.begin(), p.r_grid.end(), r);
  std::size_t i = static_cast<std::size_t>(it - p.r_grid.begin());
  if (i >= p.r_grid.size()) return {p.f_values.back(), p.df_values.back(), false};
  --i;
  const double r0 = p.r_grid[i], r1 = p.r_grid[i + 1];
  const double h = r1 - r0;
  const double f0 = p.f_values[i], f1 = p.f_values[i + 1];
  double m0 = p.df_values[i], m1 = p.df_values[i + 1];
  const double delta = (f1 - f0) / h;
  if (delta == 0.0) {
    m0 = m1 = 0.0;
  } else {
    const double a = m0 / delta, b = m1 / delta;
    if (a < 0.0) m0 = 0.0;
    if (b < 0.0) m1 = 0.0;
    const double norm2 = a * a + b * b;
    if (norm2 > 9.0) {
      const double tau = 3.0 / std::sqrt(norm2);
      m0 = tau * a * delta;
      m1 = tau * b * delta;
    }
  }
  const double t = (r - r0) / h;
  const double t2 = t * t, t3 = t2 * t;
  const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
  const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
  const double f = h00 * f0 + h10 * h * m0 + h01 * f1 + h11 * h * m1;
  const double df = (1.0 - t) * p.df_values[i] + t * p.df_values[i + 1];
  return {f, df, false};
}

void write_profile_csv(const RadialProfile& p, std::ostream& os) {
  os << "r,f,df\n";
  char line[96];
  for (std::size_t i = 0; i < p.r_grid.size(); ++i) {
    std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g\n", p.r_grid[i], p.f_values[i], p.df_values[i]);
    os << line;
  }
}

std::string profile_sidecar_json(const RadialProfile& p) {
  nlohmann::json j = {{"slope", p.slope}, {"r_max", p.r_max}, {"step", p.step}, {"tol", p.tol}};
  return j.dump(2);
}

}  // namespace gllab::radial

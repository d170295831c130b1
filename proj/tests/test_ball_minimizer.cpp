#include <vector>

#include "doctest.h"

#include "gllab/ball_minimizer.hpp"
#include "gllab/error.hpp"
#include "oracle_values.hpp"
#include "support.hpp"

using namespace gllab;
using namespace gllab::ball;
using testsupport::kFourPi;
using testsupport::profile;

namespace {

BallProblem problem(double lambda, int n, Init init) {
  BallProblem p;
  p.lambda = lambda;
  p.n = n;
  p.init = init;
  return p;
}

const MinimizeResult& hedgehog_run() {
  static const MinimizeResult r = minimize(problem(10.0, 65, Init::Hedgehog), profile());
  return r;
}

double sup_diff(const VectorField3& a, const VectorField3& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.values().size(); ++i) m = std::max(m, std::abs(a.values()[i] - b.values()[i]));
  return m;
}

}  // namespace

TEST_CASE("init names") {
  for (Init i : {Init::IdentityExtension, Init::Hedgehog, Init::RandomPerturbed}) CHECK(parse_init(to_string(i)) == i);
  CHECK_THROWS_AS(parse_init("spiral"), Error);
}

TEST_CASE("ball problem geometry") {
  const BallProblem p = problem(10.0, 65, Init::Hedgehog);
  const double h = p.spacing();
  CHECK(p.grid().half_width() == doctest::Approx(1.0 + 2.0 * h));
  CHECK(p.resolves_core());
  CHECK_FALSE(problem(40.0, 45, Init::Hedgehog).resolves_core());

  const VectorField3 u = initial_field(p, profile());
  const Grid3& g = u.grid();
  std::size_t frozen = 0, mismatched = 0;
  double boundary_err = 0.0;
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    const Vec3 x = g.position(i);
    const bool outside = norm(x) >= 1.0;
    if (outside != u.frozen(i)) ++mismatched;
    if (outside) {
      ++frozen;
      boundary_err = std::max(boundary_err, norm(u.at(i) - (1.0 / norm(x)) * x));
    }
  }
  CHECK(mismatched == 0);
  CHECK(boundary_err < 1e-15);
  CHECK(u.frozen_count() == frozen);
}

TEST_CASE("identity extension descends at lambda = 1") {
  const MinimizeResult r = minimize(problem(1.0, 33, Init::IdentityExtension), profile());
  CHECK(r.converged);
  CHECK_FALSE(r.stalled);
  REQUIRE(r.trace.size() >= 2);
  CHECK(r.cube_energy.total < r.initial_energy);
  bool monotone = true;
  for (std::size_t i = 1; i < r.trace.size(); ++i) monotone = monotone && r.trace[i].energy <= r.trace[i - 1].energy;
  CHECK(monotone);
  CHECK(r.max_norm_seen <= 1.0 + 1e-6);
  CHECK(field::max_node_norm(r.field) <= 1.0 + 1e-6);

  const VectorField3 start = initial_field(problem(1.0, 33, Init::IdentityExtension), profile());
  double frozen_drift = 0.0;
  for (std::size_t i = 0; i < start.grid().node_count(); ++i)
    if (start.frozen(i)) frozen_drift = std::max(frozen_drift, norm(r.field.at(i) - start.at(i)));
  CHECK(frozen_drift == 0.0);
}

TEST_CASE("minimizer energy near the radial value") {
  const MinimizeResult& r = hedgehog_run();
  CHECK(r.converged);
  CHECK(r.cube_energy.total <= r.initial_energy);
  CHECK(r.energy.total <= 1.05 * kFourPi);
  CHECK(r.energy.total / kFourPi == doctest::Approx(oracle::kEnergyAverage10).epsilon(0.02));
  const VorticityReport v = vorticity(r.field, 0.5);
  CHECK(norm(v.zero_estimate) < r.field.grid().h());
}

TEST_CASE("random perturbation reaches the same energy") {
  BallProblem p = problem(10.0, 65, Init::RandomPerturbed);
  p.perturbation = 0.1;
  p.seed = 3;
  const MinimizeResult r = minimize(p, profile());
  CHECK(r.converged);
  CHECK(r.energy.total == doctest::Approx(hedgehog_run().energy.total).epsilon(0.01));
}

TEST_CASE("vorticity set of a constant field is empty") {
  const VorticityReport v = vorticity(field::constant_field(Grid3(17, 0.1), {0.0, 0.0, 1.0}), 0.5);
  CHECK(v.cells.empty());
  CHECK(v.diameter == 0.0);
  CHECK(v.max_dist_origin == 0.0);
  CHECK(v.min_modulus == doctest::Approx(1.0));
}

TEST_CASE("vorticity set of a scaled hedgehog") {
  const BallProblem p = problem(10.0, 65, Init::Hedgehog);
  const Grid3 g = p.grid();
  const double h = g.h();
  const VectorField3 u = field::hedgehog_field(g, profile(), 10.0);
  const VorticityReport v = vorticity(u, 0.5);
  CHECK_FALSE(v.cells.empty());
  CHECK(std::abs(v.diameter - 2.0 * oracle::kHalfRadius / 10.0) <= 2.0 * h);
  CHECK(v.diameter <= 2.0 * v.max_dist_origin + 1e-15);
  CHECK(norm(v.zero_estimate) < 1e-12);
  CHECK(v.min_modulus == 0.0);
  std::size_t prev = 0;
  for (double delta : {0.1, 0.3, 0.5, 0.7}) {
    const VorticityReport w = vorticity(u, delta);
    double worst = 0.0;
    for (std::size_t i : w.cells) worst = std::max(worst, norm(u.at(i)));
    CHECK(worst <= delta);
    CHECK(w.cells.size() >= prev);
    prev = w.cells.size();
  }

  const Vec3 c{0.1, -0.05, 0.02};
  const VectorField3 shifted = field::hedgehog_field(g, profile(), 10.0, c);
  const VorticityReport s = vorticity(shifted, 0.5);
  CHECK(norm(s.zero_estimate - c) < 0.5 * h);
  CHECK(norm(field::interpolate(shifted, s.zero_estimate)) <= s.fit_residual + 0.05);
  CHECK_THROWS_AS(vorticity(u, 0.0), Error);
}

TEST_CASE("recenter_rescale") {
  const double lambda = 10.0;
  const BallProblem p = problem(lambda, 65, Init::Hedgehog);
  const Grid3 g = p.grid();
  const VectorField3 u = field::hedgehog_field(g, profile(), lambda);
  const Grid3 target(33, 0.99 * lambda / 32.0);
  const VectorField3 r = recenter_rescale(u, lambda, {0.0, 0.0, 0.0}, target);
  CHECK(sup_diff(r, field::hedgehog_field(target, profile(), 1.0)) < 0.02);

  const Vec3 c{0.1, 0.05, -0.1};
  const VectorField3 shifted = field::hedgehog_field(g, profile(), lambda, c);
  const Grid3 small(33, 0.99 * lambda * (1.0 - norm(c)) / 32.0);
  const VectorField3 rs = recenter_rescale(shifted, lambda, c, small);
  CHECK(sup_diff(rs, field::hedgehog_field(small, profile(), 1.0)) < 0.02);

  CHECK_THROWS_AS(recenter_rescale(shifted, lambda, c, target), Error);
  CHECK_THROWS_AS(recenter_rescale(u, 0.0, {0.0, 0.0, 0.0}, target), Error);
}

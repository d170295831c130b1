#include "gllab/reports.hpp"

#include <cmath>
#include <cstdio>

namespace gllab::report {

namespace {

json vec(const Vec3& v) { return json::array({v[0], v[1], v[2]}); }

json mat(const Mat3& m) { return json::array({vec(m[0]), vec(m[1]), vec(m[2])}); }

// NaN and infinities have no JSON spelling.
json num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

std::string g17(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

json to_json(const EnergyReport& e) {
  json j{{"lambda", e.lambda}, {"dirichlet", e.dirichlet}, {"potential", e.potential}, {"total", e.total},
         {"region", e.region()}};
  j["radius"] = e.radius ? json(*e.radius) : json(nullptr);
  return j;
}

json to_json(const ball::VorticityReport& v, const Grid3& grid) {
  json cells = json::array();
  for (std::size_t c : v.cells) cells.push_back(c);
  return {{"delta", v.delta},
          {"cell_count", v.cells.size()},
          {"cells", cells},
          {"diameter", v.diameter},
          {"max_dist_origin", v.max_dist_origin},
          {"zero_estimate", vec(v.zero_estimate)},
          {"min_modulus", v.min_modulus},
          {"min_node", v.min_node},
          {"min_node_position", vec(grid.position(v.min_node))},
          {"fit_residual", v.fit_residual},
          {"subgrid_fit", v.subgrid_fit},
          {"grid", {{"n", grid.n()}, {"h", grid.h()}}}};
}

json to_json(const diag::DegreeResult& d) {
  return {{"degree", d.degree}, {"raw", d.raw}, {"rounding_gap", d.rounding_gap}, {"min_modulus", d.min_modulus}};
}

json to_json(const diag::MonotonicityReport& m) {
  return {{"x0", vec(m.x0)},
          {"radii", m.radii},
          {"scaled_energies", m.scaled_energies},
          {"radial_terms", m.radial_terms},
          {"potential_terms", m.potential_terms},
          {"residuals", m.residuals},
          {"nondecreasing_within_residual", m.nondecreasing_within_residual()}};
}

json to_json(const diag::ShellDecay& s) {
  return {{"r", s.r}, {"modulus_term", s.modulus_term}, {"gradient_term", s.gradient_term}};
}

json to_json(const diag::RadialDecay& r) {
  return {{"tails", curve_json(r.tails)}, {"r_out", r.r_out}, {"fitted_exponent", num(r.fitted_exponent)}};
}

json to_json(const diag::BlowdownReport& b) {
  return {{"R", b.R},
          {"best_T", mat(b.best_T)},
          {"det_T", b.det_T},
          {"l2_distance", b.l2_distance},
          {"sup_distance", b.sup_distance},
          {"degree", b.degree},
          {"degree_raw", b.degree_raw},
          {"alignment_ambiguous", b.alignment_ambiguous},
          {"proper_residual", b.proper_residual},
          {"improper_residual", b.improper_residual}};
}

json to_json(const diag::SymmetryReport& s) {
  return {{"r_in", s.r_in},
          {"r_out", s.r_out},
          {"modulus_defect", s.modulus_defect},
          {"radial_defect", s.radial_defect},
          {"flux_in", s.flux_in},
          {"flux_out", s.flux_out},
          {"extrapolated", s.extrapolated}};
}

json curve_json(const diag::Curve& c) {
  json a = json::array();
  for (const auto& [r, v] : c) a.push_back({{"R", r}, {"value", num(v)}});
  return a;
}

void write_trace_csv(std::ostream& os, const std::vector<ball::TraceRow>& trace) {
  os << "iter,energy,grad_norm,step\n";
  for (const auto& t : trace) os << t.iter << ',' << g17(t.energy) << ',' << g17(t.grad_norm) << ',' << g17(t.step) << '\n';
}

void write_curve_csv(std::ostream& os, const diag::Curve& c) {
  os << "R,value\n";
  for (const auto& [r, v] : c) os << g17(r) << ',' << g17(v) << '\n';
}

void write_sphere_trace_csv(std::ostream& os, const SphereMesh& mesh, const std::vector<Vec3>& trace) {
  os << "x,y,z,ux,uy,uz\n";
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const Vec3& s = mesh.vertices[i];
    os << g17(s[0]) << ',' << g17(s[1]) << ',' << g17(s[2]) << ',' << g17(trace[i][0]) << ',' << g17(trace[i][1])
       << ',' << g17(trace[i][2]) << '\n';
  }
}

}  // namespace gllab::report

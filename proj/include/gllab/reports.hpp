#pragma once

// JSON and CSV serialization of every report type.

#include <ostream>
#include <vector>

#include "json.hpp"

#include "gllab/ball_minimizer.hpp"
#include "gllab/diagnostics.hpp"
#include "gllab/field.hpp"
#include "gllab/radial_profile.hpp"

namespace gllab::report {

using nlohmann::json;

json to_json(const EnergyReport& e);
json to_json(const ball::VorticityReport& v, const Grid3& grid);
json to_json(const diag::DegreeResult& d);
json to_json(const diag::MonotonicityReport& m);
json to_json(const diag::ShellDecay& s);
json to_json(const diag::RadialDecay& r);
/// The sphere trace goes to its own CSV; see write_trace_csv.
json to_json(const diag::BlowdownReport& b);
json to_json(const diag::SymmetryReport& s);
json curve_json(const diag::Curve& c);

void write_trace_csv(std::ostream& os, const std::vector<ball::TraceRow>& trace);
/// Header `R,value`.
void write_curve_csv(std::ostream& os, const diag::Curve& c);
/// Header `x,y,z,ux,uy,uz`: mesh vertex and sampled value.
void write_sphere_trace_csv(std::ostream& os, const SphereMesh& mesh, const std::vector<Vec3>& trace);

}  // namespace gllab::report

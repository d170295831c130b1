#include "gllab/runner.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>

#include <openssl/evp.h>

#include "gllab/ball_minimizer.hpp"
#include "gllab/checkpoint.hpp"
#include "gllab/diagnostics.hpp"
#include "gllab/error.hpp"
#include "gllab/radial_profile.hpp"
#include "gllab/reports.hpp"

namespace gllab {

namespace fs = std::filesystem;
using nlohmann::json;

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw Error(ErrorKind::Io, "sha256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

json RunManifest::to_json() const {
  json st = json::array();
  for (const auto& s : stages) st.push_back({{"name", s.name}, {"ok", s.ok}, {"seconds", s.seconds}, {"error", s.error}});
  json fl = json::array();
  for (const auto& f : files) fl.push_back({{"path", f.path}, {"sha256", f.sha256}, {"bytes", f.bytes}});
  return {{"version", version}, {"ok", ok}, {"config", config}, {"stages", st}, {"files", fl}};
}

namespace {

constexpr double kFourPi = 4.0 * std::numbers::pi;

std::string fmt(double x, int prec = 6) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*g", prec, x);
  return buf;
}

std::string lambda_dir(double lambda) { return "lambda_" + fmt(lambda, 10); }

void print_table(std::ostream& os, const std::string& title, const std::vector<std::string>& head,
                 const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> w(head.size());
  for (std::size_t c = 0; c < head.size(); ++c) w[c] = head[c].size();
  for (const auto& r : rows)
    for (std::size_t c = 0; c < r.size() && c < w.size(); ++c) w[c] = std::max(w[c], r[c].size());
  auto line = [&](const std::vector<std::string>& r) {
    for (std::size_t c = 0; c < w.size(); ++c) {
      const std::string cell = c < r.size() ? r[c] : "";
      os << (c ? "  " : "") << cell << std::string(w[c] - cell.size(), ' ');
    }
    os << '\n';
  };
  os << "\n== " << title << '\n';
  line(head);
  std::size_t total = 0;
  for (auto x : w) total += x + 2;
  os << std::string(total - 2, '-') << '\n';
  for (const auto& r : rows) line(r);
}

class RunLock {
 public:
  explicit RunLock(fs::path p) : path_(std::move(p)) {
    const int fd = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd < 0) throw Error(ErrorKind::Io, "run directory is locked by " + path_.string());
    const std::string pid = std::to_string(::getpid()) + "\n";
    if (::write(fd, pid.data(), pid.size()) < 0) {
      ::close(fd);
      throw Error(ErrorKind::Io, "cannot write " + path_.string());
    }
    ::close(fd);
  }
  ~RunLock() {
    std::error_code ec;
    fs::remove(path_, ec);
  }
  RunLock(const RunLock&) = delete;
  RunLock& operator=(const RunLock&) = delete;

 private:
  fs::path path_;
};

struct Written {
  std::string rel;
  std::string sha;
  std::uintmax_t bytes;
};

class Stage {
 public:
  explicit Stage(fs::path dir) : dir_(std::move(dir)) {}

  void write(const std::string& rel, const std::string& bytes) {
    const fs::path p = dir_ / rel;
    fs::create_directories(p.parent_path());
    std::ofstream os(p, std::ios::binary);
    os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!os) throw Error(ErrorKind::Io, "cannot write " + p.string());
    written_.push_back({rel, sha256_hex(bytes), bytes.size()});
  }

  void write_json(const std::string& rel, const json& j) { write(rel, j.dump(2) + "\n"); }

  template <class Fn>
  void write_with(const std::string& rel, Fn&& fn) {
    std::ostringstream os(std::ios::binary);
    fn(os);
    write(rel, os.str());
  }

  const std::vector<Written>& written() const { return written_; }

 private:
  fs::path dir_;
  std::vector<Written> written_;
};

struct Context {
  fs::path out;
  fs::path staging;
  RunManifest& manifest;
  std::ostream& summary;
};

bool run_stage(Context& ctx, const std::string& name, const std::function<void(Stage&)>& body) {
  const fs::path dir = ctx.staging / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  Stage st(dir);
  StageRecord rec{name, true, 0.0, ""};
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(st);
  } catch (const std::exception& e) {
    rec.ok = false;
    rec.error = e.what();
  }
  rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const std::string dest_name = rec.ok ? name : name + ".failed";
  fs::remove_all(ctx.out / name);
  fs::remove_all(ctx.out / (name + ".failed"));
  fs::rename(dir, ctx.out / dest_name);
  for (const auto& w : st.written()) ctx.manifest.files.push_back({dest_name + "/" + w.rel, w.sha, w.bytes});

  ctx.summary << "[" << (rec.ok ? "ok" : "FAILED") << "] stage " << name << " (" << fmt(rec.seconds, 3) << " s)";
  if (!rec.ok) ctx.summary << ": " << rec.error;
  ctx.summary << '\n';
  ctx.manifest.stages.push_back(rec);
  if (!rec.ok) ctx.manifest.ok = false;
  return rec.ok;
}

std::string checkpoint_bytes(const VectorField3& u, double lambda, const std::string& comment) {
  std::ostringstream os(std::ios::binary);
  write_checkpoint(os, u, lambda, comment);
  return os.str();
}

// ---- profile ----

json profile_checks(const radial::RadialProfile& p) {
  bool monotone = true, bounded = true;
  for (std::size_t i = 1; i < p.f_values.size(); ++i) {
    monotone = monotone && p.f_values[i] > p.f_values[i - 1];
    bounded = bounded && p.f_values[i] > 0.0 && p.f_values[i] < 1.0;
  }
  json j{{"slope", p.slope},
         {"r_max", p.r_max},
         {"points", p.r_grid.size()},
         {"segments", p.segments},
         {"strictly_increasing", monotone},
         {"bounded_in_unit_interval", bounded},
         {"far_field_mismatch", p.f_values.back() - (1.0 - 1.0 / (p.r_max * p.r_max))}};
  json at = json::array();
  for (double R : {50.0, 100.0, 150.0, 200.0}) {
    if (R > p.r_max) continue;
    const auto s = radial::evaluate_profile(p, R);
    at.push_back({{"R", R},
                  {"R2_one_minus_f2", R * R * (1.0 - s.f * s.f)},
                  {"R_df", R * s.df},
                  {"energy_average", radial::profile_energy_average(p, R)},
                  {"scaled_energy_over_4pi", radial::hedgehog_scaled_energy(p, R) / kFourPi}});
  }
  j["asymptotics"] = at;
  return j;
}

void profile_stage(Context& ctx, const ExperimentConfig& c, radial::RadialProfile& p) {
  const bool ok = run_stage(ctx, "profile", [&](Stage& st) {
    p = radial::solve_profile(c.profile.r_max, c.profile.tol, c.profile.step);
    st.write_with("profile.csv", [&](std::ostream& os) { radial::write_profile_csv(p, os); });
    st.write("profile.json", radial::profile_sidecar_json(p) + "\n");
    const json checks = profile_checks(p);
    st.write_json("profile_report.json", checks);
    std::vector<std::vector<std::string>> rows;
    for (const auto& a : checks["asymptotics"])
      rows.push_back({fmt(a["R"]), fmt(a["R2_one_minus_f2"]), fmt(a["R_df"]), fmt(a["energy_average"]),
                      fmt(a["scaled_energy_over_4pi"])});
    print_table(ctx.summary, "profile (slope " + fmt(p.slope, 15) + ")",
                {"R", "R^2(1-f^2)", "R f'", "energy avg", "E/(4 pi R)"}, rows);
  });
  if (!ok) throw std::runtime_error("profile stage failed");
}

// ---- field probes ----

struct FieldRef {
  const VectorField3& u;
  double lambda;
};

double admissible_radius(const Grid3& g) { return g.half_width() - g.h(); }

std::vector<double> scaled(const std::vector<double>& fractions, double R) {
  std::vector<double> out;
  for (double f : fractions) out.push_back(f * R);
  return out;
}

std::vector<double> spread(double lo, double hi, int k) {
  if (k == 1 || !(hi > lo)) return {hi};
  std::vector<double> out;
  for (int i = 0; i < k; ++i) out.push_back(lo + (hi - lo) * i / (k - 1));
  return out;
}

json degree_sweep(const VectorField3& u, const std::vector<double>& radii, const SphereMesh& mesh) {
  json arr = json::array();
  for (double R : radii) {
    json e{{"R", R}};
    try {
      e.update(report::to_json(diag::degree_on_sphere(u, R, mesh)));
    } catch (const Error& err) {
      if (err.kind() != ErrorKind::DegreeUndefined && err.kind() != ErrorKind::MeshTooCoarse) throw;
      e["error"] = err.what();
    }
    arr.push_back(e);
  }
  return arr;
}

json vorticity_reports(const VectorField3& u, const std::vector<double>& deltas) {
  json arr = json::array();
  for (double d : deltas) arr.push_back(report::to_json(ball::vorticity(u, d), u.grid()));
  return arr;
}

// Writes every probe for one field under `prefix` and returns a digest.
json probe_field(Stage& st, const std::string& prefix, const FieldRef& f, const radial::RadialProfile& p,
                 const DiagnoseConfig& d, std::ostream& summary) {
  const VectorField3& u = f.u;
  const Grid3& g = u.grid();
  const double R_adm = admissible_radius(g);
  const SphereMesh mesh = SphereMesh::icosphere(d.mesh_level);
  const diag::Quadrature q{d.mesh_level, d.panel_over_h};
  const std::string pre = prefix.empty() ? "" : prefix + "/";
  json digest;

  st.write_json(pre + "energy.json", report::to_json(field::energy(u, f.lambda)));
  st.write_with(pre + "sphere_mesh.off", [&](std::ostream& os) { write_off(mesh, os); });

  const json vort = vorticity_reports(u, d.deltas);
  st.write_json(pre + "vorticity.json", vort);
  const ball::VorticityReport v0 = ball::vorticity(u, d.deltas.front());

  const double lo = std::max(2.0 * v0.diameter, 2.0 * g.h());
  const json deg = degree_sweep(u, spread(lo, R_adm, d.degree_radii), mesh);
  st.write_json(pre + "degree.json", deg);
  digest["degrees"] = json::array();
  for (const auto& e : deg) digest["degrees"].push_back(e.contains("degree") ? e["degree"] : json(nullptr));

  Vec3 x0 = v0.cells.empty() ? g.center() : v0.zero_estimate;
  double shift = 0.0;
  for (std::size_t a = 0; a < 3; ++a) shift = std::max(shift, std::abs(x0[a] - g.center()[a]));
  if (shift >= 0.5 * R_adm) {
    x0 = g.center();
    shift = 0.0;
  }
  const auto mono = diag::monotonicity_probe(u, f.lambda, x0, scaled(d.radius_fractions, R_adm - shift), q);
  st.write_json(pre + "monotonicity.json", report::to_json(mono));
  {
    diag::Curve c;
    for (std::size_t i = 0; i < mono.radii.size(); ++i) c.emplace_back(mono.radii[i], mono.scaled_energies[i]);
    st.write_with(pre + "monotonicity.csv", [&](std::ostream& os) { report::write_curve_csv(os, c); });
  }
  digest["monotone"] = mono.nondecreasing_within_residual();

  const std::vector<double> radii = scaled(d.radius_fractions, R_adm);
  const auto quant = diag::quantization_probe(u, f.lambda, radii, q);
  st.write_json(pre + "quantization.json",
                {{"curve", report::curve_json(quant)}, {"nondecreasing", diag::nondecreasing(quant, 0.0)}});
  st.write_with(pre + "quantization.csv", [&](std::ostream& os) { report::write_curve_csv(os, quant); });
  digest["quantization_over_4pi"] = quant.back().second / kFourPi;

  const auto pot = diag::potential_decay_probe(u, radii, q);
  st.write_json(pre + "potential_decay.json", {{"curve", report::curve_json(pot)}});
  st.write_with(pre + "potential_decay.csv", [&](std::ostream& os) { report::write_curve_csv(os, pot); });

  json shells = json::array();
  for (const auto& s : diag::shell_decay_probe(u, radii, mesh)) shells.push_back(report::to_json(s));
  st.write_json(pre + "shell_decay.json", shells);

  std::vector<double> inner;
  for (double r : radii)
    if (r < R_adm * (1.0 - 1e-9)) inner.push_back(r);
  if (!inner.empty()) {
    const auto rd = diag::radial_derivative_decay(u, inner, R_adm, q);
    st.write_json(pre + "radial_decay.json", report::to_json(rd));
    st.write_with(pre + "radial_decay.csv", [&](std::ostream& os) { report::write_curve_csv(os, rd.tails); });
  }

  if (f.lambda == 1.0) {
    const auto sym =
        diag::symmetry_defect(u, p, d.annulus_fractions[0] * R_adm, d.annulus_fractions[1] * R_adm, q);
    st.write_json(pre + "symmetry.json", report::to_json(sym));
    digest["flux_out_over_4pi"] = sym.flux_out / kFourPi;
    digest["modulus_defect"] = sym.modulus_defect;
  } else {
    st.write_json(pre + "symmetry.json", {{"skipped", "the division map needs a unit-coupling field"}});
  }

  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < quant.size(); ++i)
    rows.push_back({fmt(quant[i].first), fmt(quant[i].second / kFourPi), fmt(pot[i].second),
                    i < mono.scaled_energies.size() ? fmt(mono.scaled_energies[i] / kFourPi) : ""});
  print_table(summary, "probes " + (prefix.empty() ? std::string("field") : prefix),
              {"R", "E/(4 pi R)", "potential/R", "mono E/(4 pi r)"}, rows);
  return digest;
}

json blowdown_field(Stage& st, const std::string& prefix, const VectorField3& u, double fraction, int level,
                    std::ostream& summary) {
  const SphereMesh mesh = SphereMesh::icosphere(level);
  const double R = fraction * admissible_radius(u.grid());
  const auto b = diag::blowdown(u, R, mesh);
  const std::string pre = prefix.empty() ? "" : prefix + "/";
  st.write_json(pre + "blowdown.json", report::to_json(b));
  st.write_with(pre + "blowdown_trace.csv", [&](std::ostream& os) { report::write_sphere_trace_csv(os, mesh, b.trace); });
  print_table(summary, "blowdown " + (prefix.empty() ? std::string("field") : prefix),
              {"R", "l2", "l2/sqrt(4 pi)", "sup", "degree", "det T"},
              {{fmt(R), fmt(b.l2_distance), fmt(b.l2_distance / std::sqrt(kFourPi)), fmt(b.sup_distance),
                std::to_string(b.degree), fmt(b.det_T, 3)}});
  return report::to_json(b);
}

// The field named by c.field, with its coupling.
std::pair<VectorField3, double> source_field(const ExperimentConfig& c, const radial::RadialProfile& p) {
  if (c.field.kind == FieldSourceConfig::Kind::Checkpoint) {
    Checkpoint ck = load_checkpoint(c.field.checkpoint);
    return {std::move(ck.field), ck.lambda};
  }
  const Grid3 g(c.field.n, c.field.h, {0.0, 0.0, 0.0});
  return {field::hedgehog_field(g, p, c.field.lambda), c.field.lambda};
}

Grid3 rescale_grid(const RescaleConfig& rc, double lambda, const Vec3& zero) {
  const double side = rc.side_fraction * lambda * (1.0 - norm(zero));
  return Grid3(rc.n, side / (rc.n - 1), {0.0, 0.0, 0.0});
}

struct Minimized {
  ball::BallProblem problem;
  ball::MinimizeResult result;
  ball::VorticityReport vortex;
};

json minimize_report(const Minimized& m) {
  bool monotone = true;
  for (std::size_t i = 1; i < m.result.trace.size(); ++i)
    monotone = monotone && m.result.trace[i].energy <= m.result.trace[i - 1].energy;
  const auto& p = m.problem;
  return {{"problem",
           {{"lambda", p.lambda},
            {"n", p.n},
            {"h", p.spacing()},
            {"init", ball::to_string(p.init)},
            {"seed", p.seed},
            {"perturbation", p.perturbation},
            {"grad_tol", p.grad_tol},
            {"max_iterations", p.max_iterations}}},
          {"ball_energy", report::to_json(m.result.energy)},
          {"cube_energy", report::to_json(m.result.cube_energy)},
          {"energy_over_4pi", m.result.energy.total / kFourPi},
          {"initial_energy", m.result.initial_energy},
          {"iterations", m.result.iterations},
          {"converged", m.result.converged},
          {"stalled", m.result.stalled},
          {"resolution_warning", m.result.resolution_warning},
          {"max_norm_seen", m.result.max_norm_seen},
          {"trace_monotone", monotone}};
}

std::vector<Minimized> minimize_stage(Context& ctx, const ExperimentConfig& c, const radial::RadialProfile& p) {
  std::vector<Minimized> runs;
  const bool ok = run_stage(ctx, "minimize", [&](Stage& st) {
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < c.minimize.lambdas.size(); ++i) {
      const ball::BallProblem prob = c.minimize.problem(i);
      ball::MinimizeResult res = ball::minimize(prob, p);
      ball::VorticityReport vx = ball::vorticity(res.field, c.diagnose.deltas.front());
      Minimized m{prob, std::move(res), std::move(vx)};
      const std::string dir = lambda_dir(m.problem.lambda) + "/";
      st.write(dir + "field.ckpt", checkpoint_bytes(m.result.field, m.problem.lambda,
                                                    "ball minimizer " + lambda_dir(m.problem.lambda)));
      st.write_json(dir + "energy.json", minimize_report(m));
      st.write_with(dir + "trace.csv", [&](std::ostream& os) { report::write_trace_csv(os, m.result.trace); });
      st.write_json(dir + "vorticity.json", vorticity_reports(m.result.field, c.diagnose.deltas));
      rows.push_back({fmt(m.problem.lambda), std::to_string(m.problem.n), fmt(m.problem.spacing(), 4),
                      std::to_string(m.result.iterations), m.result.converged ? "yes" : "no",
                      fmt(m.result.energy.total / kFourPi), fmt(m.vortex.diameter * m.problem.lambda),
                      fmt(m.vortex.max_dist_origin)});
      runs.push_back(std::move(m));
    }
    print_table(ctx.summary, "minimize",
                {"lambda", "n", "h", "iters", "converged", "E/4pi", "lambda*diam", "max_dist"}, rows);
  });
  if (!ok) throw std::runtime_error("minimize stage failed");
  return runs;
}

void pipeline(Context& ctx, const ExperimentConfig& c, const radial::RadialProfile& p) {
  const std::vector<Minimized> runs = minimize_stage(ctx, c, p);

  std::vector<VectorField3> rescaled;
  if (!run_stage(ctx, "rescale", [&](Stage& st) {
        for (const auto& m : runs) {
          const Grid3 tg = rescale_grid(c.rescale, m.problem.lambda, m.vortex.zero_estimate);
          VectorField3 r = ball::recenter_rescale(m.result.field, m.problem.lambda, m.vortex.zero_estimate, tg);
          const std::string dir = lambda_dir(m.problem.lambda) + "/";
          st.write(dir + "field.ckpt", checkpoint_bytes(r, 1.0, "recentered " + lambda_dir(m.problem.lambda)));
          st.write_json(dir + "rescale.json", {{"zero_estimate", {m.vortex.zero_estimate[0], m.vortex.zero_estimate[1],
                                                                  m.vortex.zero_estimate[2]}},
                                               {"n", tg.n()},
                                               {"h", tg.h()},
                                               {"half_width", tg.half_width()},
                                               {"center_modulus", norm(field::interpolate(r, tg.center()))}});
          rescaled.push_back(std::move(r));
        }
      }))
    throw std::runtime_error("rescale stage failed");

  const SphereMesh mesh = SphereMesh::icosphere(c.diagnose.mesh_level);
  std::vector<json> digests;
  if (!run_stage(ctx, "diagnose", [&](Stage& st) {
        for (std::size_t i = 0; i < runs.size(); ++i) {
          const Minimized& m = runs[i];
          const std::string dir = lambda_dir(m.problem.lambda);
          const double lo = std::max(2.0 * m.vortex.diameter, 2.0 * m.problem.spacing());
          const json deg = degree_sweep(m.result.field, spread(lo, 1.0, c.diagnose.degree_radii), mesh);
          st.write_json(dir + "/minimizer_degree.json", deg);
          const auto mono = diag::monotonicity_probe(
              m.result.field, m.problem.lambda, {0.0, 0.0, 0.0},
              scaled(c.diagnose.radius_fractions, 1.0), {c.diagnose.mesh_level, c.diagnose.panel_over_h});
          st.write_json(dir + "/minimizer_monotonicity.json", report::to_json(mono));
          json d = probe_field(st, dir + "/recentered", {rescaled[i], 1.0}, p, c.diagnose, ctx.summary);
          d["minimizer_degrees"] = json::array();
          for (const auto& e : deg) d["minimizer_degrees"].push_back(e.contains("degree") ? e["degree"] : json(nullptr));
          digests.push_back(d);
        }
      }))
    throw std::runtime_error("diagnose stage failed");

  if (!run_stage(ctx, "blowdown", [&](Stage& st) {
        for (std::size_t i = 0; i < runs.size(); ++i)
          blowdown_field(st, lambda_dir(runs[i].problem.lambda), rescaled[i], c.blowdown.radius_fraction,
                         c.diagnose.mesh_level, ctx.summary);
      }))
    throw std::runtime_error("blowdown stage failed");

  run_stage(ctx, "tables", [&](Stage& st) {
    std::ostringstream csv;
    csv << "lambda,n,h,resolves_core,delta,diameter,lambda_diameter,max_dist_origin,zero_norm,energy_over_4pi,"
           "iterations,converged\n";
    double lo = 0.0, hi = 0.0;
    bool decreasing = true;
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < runs.size(); ++i) {
      const Minimized& m = runs[i];
      const double ld = m.vortex.diameter * m.problem.lambda;
      lo = i ? std::min(lo, ld) : ld;
      hi = i ? std::max(hi, ld) : ld;
      if (i && !(m.vortex.max_dist_origin < runs[i - 1].vortex.max_dist_origin)) decreasing = false;
      const std::vector<std::string> row{fmt(m.problem.lambda, 17), std::to_string(m.problem.n),
                                         fmt(m.problem.spacing(), 17), m.problem.resolves_core() ? "1" : "0",
                                         fmt(m.vortex.delta, 17), fmt(m.vortex.diameter, 17), fmt(ld, 17),
                                         fmt(m.vortex.max_dist_origin, 17), fmt(norm(m.vortex.zero_estimate), 17),
                                         fmt(m.result.energy.total / kFourPi, 17), std::to_string(m.result.iterations),
                                         m.result.converged ? "1" : "0"};
      for (std::size_t k = 0; k < row.size(); ++k) csv << (k ? "," : "") << row[k];
      csv << '\n';
      rows.push_back({fmt(m.problem.lambda), fmt(m.vortex.diameter), fmt(ld), fmt(m.vortex.max_dist_origin),
                      m.problem.resolves_core() ? "yes" : "no"});
    }
    st.write("vorticity_scaling.csv", csv.str());
    json s{{"lambda_diameter_min", lo},
           {"lambda_diameter_max", hi},
           {"relative_variation", lo > 0.0 ? (hi - lo) / lo : 0.0},
           {"max_dist_origin_decreasing", decreasing},
           {"fields", digests}};
    st.write_json("summary.json", s);
    print_table(ctx.summary, "vorticity scaling", {"lambda", "diameter", "lambda*diam", "max_dist", "h<=0.5/lambda"},
                rows);
  });
}

}  // namespace

RunManifest run(const ExperimentConfig& c, const fs::path& out, std::ostream& summary) {
  fs::create_directories(out);
  RunLock lock(out / ".lock");
  RunManifest manifest;
  manifest.config = to_json(c);
  Context ctx{out, out / ".staging", manifest, summary};
  fs::remove_all(ctx.staging);
  fs::create_directories(ctx.staging);

  try {
    radial::RadialProfile p;
    profile_stage(ctx, c, p);
    switch (c.mode) {
      case Mode::Profile: break;
      case Mode::Minimize: minimize_stage(ctx, c, p); break;
      case Mode::Diagnose:
        run_stage(ctx, "diagnose", [&](Stage& st) {
          auto [u, lambda] = source_field(c, p);
          probe_field(st, "", {u, lambda}, p, c.diagnose, ctx.summary);
        });
        break;
      case Mode::Blowdown:
        run_stage(ctx, "blowdown", [&](Stage& st) {
          auto [u, lambda] = source_field(c, p);
          if (c.blowdown.recenter) {
            const auto v = ball::vorticity(u, c.diagnose.deltas.front());
            u = ball::recenter_rescale(u, lambda, v.zero_estimate, rescale_grid(c.rescale, lambda, v.zero_estimate));
          }
          blowdown_field(st, "", u, c.blowdown.radius_fraction, c.diagnose.mesh_level, ctx.summary);
        });
        break;
      case Mode::FullPipeline: pipeline(ctx, c, p); break;
    }
  } catch (const std::exception&) {
    // The failing stage is already recorded; later stages are skipped.
    manifest.ok = false;
  }

  fs::remove_all(ctx.staging);
  const fs::path tmp = out / "manifest.json.tmp";
  {
    std::ofstream os(tmp);
    os << manifest.to_json().dump(2) << '\n';
    if (!os) throw Error(ErrorKind::Io, "cannot write manifest");
  }
  fs::rename(tmp, out / "manifest.json");
  summary << (manifest.ok ? "run complete: " : "run FAILED: ") << out.string() << '\n';
  return manifest;
}

}  // namespace gllab

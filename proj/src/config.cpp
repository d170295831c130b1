#include "gllab/config.hpp"

#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "gllab/error.hpp"

namespace gllab {

using nlohmann::json;

Mode parse_mode(const std::string& name) {
  if (name == "profile") return Mode::Profile;
  if (name == "minimize") return Mode::Minimize;
  if (name == "diagnose") return Mode::Diagnose;
  if (name == "blowdown") return Mode::Blowdown;
  if (name == "full-pipeline" || name == "pipeline") return Mode::FullPipeline;
  throw Error(ErrorKind::InvalidParameter, "unknown mode '" + name + "'");
}

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::Profile: return "profile";
    case Mode::Minimize: return "minimize";
    case Mode::Diagnose: return "diagnose";
    case Mode::Blowdown: return "blowdown";
    case Mode::FullPipeline: return "full-pipeline";
  }
  return "?";
}

int MinimizeConfig::grid_size_for(std::size_t i) const {
  return grid_sizes.size() == 1 ? grid_sizes.front() : grid_sizes.at(i);
}

ball::BallProblem MinimizeConfig::problem(std::size_t i) const {
  ball::BallProblem p;
  p.lambda = lambdas.at(i);
  p.n = grid_size_for(i);
  p.init = init;
  p.perturbation = perturbation;
  p.seed = seed;
  p.grad_tol = grad_tol;
  p.max_iterations = max_iterations;
  p.armijo = armijo;
  p.project_unit_ball = project_unit_ball;
  return p;
}

namespace {

class Reader {
 public:
  std::vector<ConfigError> errors;

  void fail(const std::string& path, const std::string& msg) { errors.push_back({path, msg}); }

  // Returns the sub-object, or nullptr when absent or of the wrong type.
  const json* section(const json& parent, const std::string& key, const std::string& path,
                      const std::set<std::string>& known) {
    if (!parent.contains(key)) return nullptr;
    const json& s = parent.at(key);
    if (!s.is_object()) {
      fail(path, "expected an object");
      return nullptr;
    }
    unknown_keys(s, path, known);
    return &s;
  }

  void unknown_keys(const json& obj, const std::string& path, const std::set<std::string>& known) {
    for (const auto& [k, v] : obj.items())
      if (!known.count(k)) fail(path + "." + k, "unknown key");
  }

  using Check = std::function<std::string(double)>;  // empty string means valid

  void number(const json* obj, const std::string& key, const std::string& path, double& out, const Check& check) {
    if (!obj || !obj->contains(key)) return;
    const json& v = obj->at(key);
    const std::string p = path + "." + key;
    if (!v.is_number()) return fail(p, "expected a number");
    const double x = v.get<double>();
    if (const std::string m = check(x); !m.empty()) return fail(p, m);
    out = x;
  }

  template <class Int>
  void integer(const json* obj, const std::string& key, const std::string& path, Int& out, const Check& check) {
    if (!obj || !obj->contains(key)) return;
    const json& v = obj->at(key);
    const std::string p = path + "." + key;
    if (!v.is_number_integer()) return fail(p, "expected an integer");
    if constexpr (std::is_unsigned_v<Int>) {
      if (!v.is_number_unsigned()) return fail(p, "must be non-negative");
    }
    const Int x = v.get<Int>();
    if (const std::string m = check(static_cast<double>(x)); !m.empty()) return fail(p, m);
    out = x;
  }

  void boolean(const json* obj, const std::string& key, const std::string& path, bool& out) {
    if (!obj || !obj->contains(key)) return;
    const json& v = obj->at(key);
    if (!v.is_boolean()) return fail(path + "." + key, "expected a boolean");
    out = v.get<bool>();
  }

  void string(const json* obj, const std::string& key, const std::string& path, std::string& out) {
    if (!obj || !obj->contains(key)) return;
    const json& v = obj->at(key);
    if (!v.is_string()) return fail(path + "." + key, "expected a string");
    out = v.get<std::string>();
  }

  template <class T>
  void list(const json* obj, const std::string& key, const std::string& path, std::vector<T>& out,
            const Check& check) {
    if (!obj || !obj->contains(key)) return;
    const json& v = obj->at(key);
    const std::string p = path + "." + key;
    if (!v.is_array()) return fail(p, "expected an array");
    if (v.empty()) return fail(p, "must not be empty");
    std::vector<T> vals;
    bool good = true;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const std::string pi = p + "[" + std::to_string(i) + "]";
      const json& e = v[i];
      if constexpr (std::is_integral_v<T>) {
        if (!e.is_number_integer()) {
          fail(pi, "expected an integer");
          good = false;
          continue;
        }
      } else if (!e.is_number()) {
        fail(pi, "expected a number");
        good = false;
        continue;
      }
      const T x = e.get<T>();
      if (const std::string m = check(static_cast<double>(x)); !m.empty()) {
        fail(pi, m);
        good = false;
        continue;
      }
      vals.push_back(x);
    }
    if (good) out = std::move(vals);
  }
};

Reader::Check positive() {
  return [](double x) { return x > 0.0 ? std::string() : std::string("must be positive"); };
}

Reader::Check at_least(double lo, const std::string& why) {
  return [lo, why](double x) { return x >= lo ? std::string() : why; };
}

Reader::Check odd_grid() {
  return [](double x) {
    const long v = static_cast<long>(x);
    if (v % 2 == 0) return std::string("grid size must be odd so the center is a node");
    if (v < 17) return std::string("grid size must be at least 17");
    return std::string();
  };
}

Reader::Check open_unit() {
  return [](double x) { return x > 0.0 && x < 1.0 ? std::string() : std::string("must lie in (0, 1)"); };
}

Reader::Check half_open_unit() {
  return [](double x) { return x > 0.0 && x <= 1.0 ? std::string() : std::string("must lie in (0, 1]"); };
}

bool creatable(const std::filesystem::path& p) {
  std::error_code ec;
  std::filesystem::path cur = std::filesystem::absolute(p, ec);
  if (ec) return false;
  while (!cur.empty()) {
    if (std::filesystem::exists(cur, ec)) return std::filesystem::is_directory(cur, ec);
    if (cur == cur.parent_path()) break;
    cur = cur.parent_path();
  }
  return false;
}

const std::set<std::string> kTopKeys{"mode", "output_dir", "profile", "minimize", "field",
                                     "diagnose", "rescale", "blowdown"};

}  // namespace

ValidationResult validate_json(const json& doc) {
  ValidationResult res;
  Reader rd;
  ExperimentConfig c;
  if (!doc.is_object()) {
    res.errors.push_back({"$", "config must be a JSON object"});
    return res;
  }
  rd.unknown_keys(doc, "$", kTopKeys);

  if (doc.contains("mode")) {
    if (!doc["mode"].is_string()) rd.fail("$.mode", "expected a string");
    else {
      try {
        c.mode = parse_mode(doc["mode"].get<std::string>());
      } catch (const Error&) {
        rd.fail("$.mode", "must be one of profile, minimize, diagnose, blowdown, full-pipeline");
      }
    }
  }
  rd.string(&doc, "output_dir", "$", c.output_dir);
  if (c.output_dir.empty()) rd.fail("$.output_dir", "must not be empty");
  else if (!creatable(c.output_dir)) rd.fail("$.output_dir", "cannot be created");

  if (const json* s = rd.section(doc, "profile", "$.profile", {"r_max", "step", "tol"})) {
    rd.number(s, "r_max", "$.profile", c.profile.r_max, at_least(50.0, "r_max must be at least 50"));
    rd.number(s, "step", "$.profile", c.profile.step, positive());
    rd.number(s, "tol", "$.profile", c.profile.tol,
              [](double x) { return x > 0.0 && x <= 1e-8 ? std::string() : std::string("tol must lie in (0, 1e-8]"); });
    if (c.profile.step >= c.profile.r_max / 100.0) rd.fail("$.profile.step", "step must be below r_max / 100");
  }

  if (const json* s = rd.section(doc, "minimize", "$.minimize",
                                 {"lambdas", "grid_sizes", "init", "perturbation", "seed", "grad_tol",
                                  "max_iterations", "armijo", "project_unit_ball"})) {
    const std::string p = "$.minimize";
    rd.list(s, "lambdas", p, c.minimize.lambdas, at_least(1.0, "lambda must be at least 1"));
    rd.list(s, "grid_sizes", p, c.minimize.grid_sizes, odd_grid());
    if (s->contains("init")) {
      if (!(*s)["init"].is_string()) rd.fail(p + ".init", "expected a string");
      else {
        try {
          c.minimize.init = ball::parse_init((*s)["init"].get<std::string>());
        } catch (const Error&) {
          rd.fail(p + ".init", "must be one of identity-extension, hedgehog, random-perturbed");
        }
      }
    }
    rd.number(s, "perturbation", p, c.minimize.perturbation,
              [](double x) { return x >= 0.0 && x < 1.0 ? std::string() : std::string("must lie in [0, 1)"); });
    rd.integer(s, "seed", p, c.minimize.seed, [](double) { return std::string(); });
    rd.number(s, "grad_tol", p, c.minimize.grad_tol, positive());
    rd.integer(s, "max_iterations", p, c.minimize.max_iterations, at_least(1.0, "must be at least 1"));
    rd.number(s, "armijo", p, c.minimize.armijo,
              [](double x) { return x > 0.0 && x < 0.5 ? std::string() : std::string("must lie in (0, 0.5)"); });
    rd.boolean(s, "project_unit_ball", p, c.minimize.project_unit_ball);
  }
  if (c.minimize.grid_sizes.size() != 1 && c.minimize.grid_sizes.size() != c.minimize.lambdas.size())
    rd.fail("$.minimize.grid_sizes", "needs one entry or one per lambda");

  if (const json* s = rd.section(doc, "field", "$.field", {"source", "checkpoint", "lambda", "n", "h"})) {
    const std::string p = "$.field";
    if (s->contains("source")) {
      const json& v = (*s)["source"];
      if (v == "hedgehog") c.field.kind = FieldSourceConfig::Kind::Hedgehog;
      else if (v == "checkpoint") c.field.kind = FieldSourceConfig::Kind::Checkpoint;
      else rd.fail(p + ".source", "must be hedgehog or checkpoint");
    }
    rd.string(s, "checkpoint", p, c.field.checkpoint);
    rd.number(s, "lambda", p, c.field.lambda, at_least(1.0, "lambda must be at least 1"));
    rd.integer(s, "n", p, c.field.n, odd_grid());
    rd.number(s, "h", p, c.field.h, positive());
  }
  if (c.field.kind == FieldSourceConfig::Kind::Checkpoint) {
    std::error_code ec;
    if (c.field.checkpoint.empty()) rd.fail("$.field.checkpoint", "required when source is checkpoint");
    else if (!std::filesystem::is_regular_file(c.field.checkpoint, ec))
      rd.fail("$.field.checkpoint", "file does not exist");
  }

  if (const json* s = rd.section(doc, "diagnose", "$.diagnose",
                                 {"deltas", "mesh_level", "panel_over_h", "radius_fractions", "degree_radii",
                                  "annulus_fractions"})) {
    const std::string p = "$.diagnose";
    rd.list(s, "deltas", p, c.diagnose.deltas, open_unit());
    rd.integer(s, "mesh_level", p, c.diagnose.mesh_level, [](double x) {
      return x >= 1 && x <= 7 ? std::string() : std::string("mesh level must lie in [1, 7]");
    });
    rd.number(s, "panel_over_h", p, c.diagnose.panel_over_h, [](double x) {
      return x > 0.0 && x <= 4.0 ? std::string() : std::string("must lie in (0, 4]");
    });
    rd.list(s, "radius_fractions", p, c.diagnose.radius_fractions, half_open_unit());
    rd.integer(s, "degree_radii", p, c.diagnose.degree_radii, [](double x) {
      return x >= 1 && x <= 50 ? std::string() : std::string("must lie in [1, 50]");
    });
    rd.list(s, "annulus_fractions", p, c.diagnose.annulus_fractions, half_open_unit());
  }
  {
    const auto& f = c.diagnose.radius_fractions;
    for (std::size_t i = 0; i + 1 < f.size(); ++i)
      if (!(f[i] < f[i + 1])) {
        rd.fail("$.diagnose.radius_fractions", "must be strictly increasing");
        break;
      }
    const auto& a = c.diagnose.annulus_fractions;
    if (a.size() != 2 || !(a[0] < a[1])) rd.fail("$.diagnose.annulus_fractions", "needs [inner, outer] with inner < outer");
  }

  if (const json* s = rd.section(doc, "rescale", "$.rescale", {"n", "side_fraction"})) {
    rd.integer(s, "n", "$.rescale", c.rescale.n, odd_grid());
    rd.number(s, "side_fraction", "$.rescale", c.rescale.side_fraction, half_open_unit());
  }

  if (const json* s = rd.section(doc, "blowdown", "$.blowdown", {"radius_fraction", "recenter"})) {
    rd.number(s, "radius_fraction", "$.blowdown", c.blowdown.radius_fraction, half_open_unit());
    rd.boolean(s, "recenter", "$.blowdown", c.blowdown.recenter);
  }

  res.errors = std::move(rd.errors);
  if (res.errors.empty()) res.config = c;
  return res;
}

ValidationResult validate_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    ValidationResult r;
    r.errors.push_back({"$", std::string("malformed JSON: ") + e.what()});
    return r;
  }
  return validate_json(doc);
}

ValidationResult validate_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    ValidationResult r;
    r.errors.push_back({"$", "cannot read " + path.string()});
    return r;
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return validate_text(ss.str());
}

json to_json(const ExperimentConfig& c) {
  json j;
  j["mode"] = to_string(c.mode);
  j["output_dir"] = c.output_dir;
  j["profile"] = {{"r_max", c.profile.r_max}, {"step", c.profile.step}, {"tol", c.profile.tol}};
  j["minimize"] = {{"lambdas", c.minimize.lambdas},
                   {"grid_sizes", c.minimize.grid_sizes},
                   {"init", ball::to_string(c.minimize.init)},
                   {"perturbation", c.minimize.perturbation},
                   {"seed", c.minimize.seed},
                   {"grad_tol", c.minimize.grad_tol},
                   {"max_iterations", c.minimize.max_iterations},
                   {"armijo", c.minimize.armijo},
                   {"project_unit_ball", c.minimize.project_unit_ball}};
  j["field"] = {{"source", c.field.kind == FieldSourceConfig::Kind::Hedgehog ? "hedgehog" : "checkpoint"},
                {"checkpoint", c.field.checkpoint},
                {"lambda", c.field.lambda},
                {"n", c.field.n},
                {"h", c.field.h}};
  j["diagnose"] = {{"deltas", c.diagnose.deltas},
                   {"mesh_level", c.diagnose.mesh_level},
                   {"panel_over_h", c.diagnose.panel_over_h},
                   {"radius_fractions", c.diagnose.radius_fractions},
                   {"degree_radii", c.diagnose.degree_radii},
                   {"annulus_fractions", c.diagnose.annulus_fractions}};
  j["rescale"] = {{"n", c.rescale.n}, {"side_fraction", c.rescale.side_fraction}};
  j["blowdown"] = {{"radius_fraction", c.blowdown.radius_fraction}, {"recenter", c.blowdown.recenter}};
  return j;
}

std::string format_errors(const std::vector<ConfigError>& errors) {
  std::ostringstream os;
  for (const auto& e : errors) os << e.path << ": " << e.message << "\n";
  return os.str();
}

}  // namespace gllab

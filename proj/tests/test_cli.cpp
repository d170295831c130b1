#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "doctest.h"

#include "gllab/config.hpp"
#include "gllab/error.hpp"
#include "gllab/runner.hpp"

using namespace gllab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("gllab_test_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void write_file(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

bool has_error_at(const ValidationResult& v, const std::string& path) {
  for (const auto& e : v.errors)
    if (e.path == path) return true;
  return false;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(GLLAB_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.mode = Mode::Minimize;
  c.minimize.lambdas = {2.0};
  c.minimize.grid_sizes = {21};
  return c;
}

std::map<std::string, std::string> checksums(const RunManifest& m) {
  std::map<std::string, std::string> out;
  for (const auto& f : m.files) out[f.path] = f.sha256;
  return out;
}

}  // namespace

TEST_CASE("default config file holds the defaults") {
  const ValidationResult v = validate_file(GLLAB_DEFAULT_CONFIG);
  REQUIRE(v.ok());
  CHECK(*v.config == ExperimentConfig{});
  const ValidationResult empty = validate_text("{}");
  REQUIRE(empty.ok());
  CHECK(*empty.config == ExperimentConfig{});
}

TEST_CASE("expanded config round-trips") {
  ExperimentConfig c = small_config();
  c.diagnose.deltas = {0.25, 0.5};
  const ValidationResult v = validate_json(to_json(c));
  REQUIRE(v.ok());
  CHECK(*v.config == c);
}

TEST_CASE("validation reports every error with its path") {
  const ValidationResult v = validate_text(R"({
    "minimize": {"lambdas": [0.5, 10], "grid_sizes": [64, 65]},
    "diagnose": {"deltas": [1.5], "colour": 3},
    "profile": {"tol": 1e-3},
    "extra": true
  })");
  CHECK_FALSE(v.ok());
  CHECK(has_error_at(v, "$.minimize.lambdas[0]"));
  CHECK_FALSE(has_error_at(v, "$.minimize.lambdas[1]"));
  CHECK(has_error_at(v, "$.minimize.grid_sizes[0]"));
  CHECK(has_error_at(v, "$.diagnose.deltas[0]"));
  CHECK(has_error_at(v, "$.diagnose.colour"));
  CHECK(has_error_at(v, "$.profile.tol"));
  CHECK(has_error_at(v, "$.extra"));
  CHECK(v.errors.size() == 6);
  CHECK(format_errors(v.errors).find("$.minimize.lambdas[0]") != std::string::npos);

  const ValidationResult bad = validate_text("{\"minimize\": ");
  CHECK_FALSE(bad.ok());
  CHECK(has_error_at(bad, "$"));

  const ValidationResult missing = validate_text(R"({"field": {"source": "checkpoint"}})");
  CHECK_FALSE(missing.ok());
  CHECK(has_error_at(missing, "$.field.checkpoint"));
}

TEST_CASE("mode names") {
  for (Mode m : {Mode::Profile, Mode::Minimize, Mode::Diagnose, Mode::Blowdown, Mode::FullPipeline})
    CHECK(parse_mode(to_string(m)) == m);
  CHECK(parse_mode("pipeline") == Mode::FullPipeline);
  CHECK_THROWS(parse_mode("everything"));
}

TEST_CASE("runs are reproducible and promoted atomically") {
  const ExperimentConfig c = small_config();
  std::ostringstream log;
  const fs::path a = scratch("run_a"), b = scratch("run_b");
  const RunManifest ma = run(c, a, log);
  const RunManifest mb = run(c, b, log);
  REQUIRE(ma.ok);
  REQUIRE(mb.ok);
  CHECK(checksums(ma) == checksums(mb));
  CHECK_FALSE(ma.files.empty());
  CHECK(fs::exists(a / "manifest.json"));
  CHECK(fs::exists(a / "profile" / "profile.csv"));
  CHECK(fs::exists(a / "minimize"));
  CHECK_FALSE(fs::exists(a / ".lock"));
  CHECK((!fs::exists(a / ".staging") || fs::is_empty(a / ".staging")));

  for (const auto& f : ma.files) {
    std::ifstream in(a / f.path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    CHECK(sha256_hex(ss.str()) == f.sha256);
    CHECK(ss.str().size() == f.bytes);
  }
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("a held lock refuses the run") {
  const fs::path d = scratch("locked");
  write_file(d / ".lock", "123\n");
  std::ostringstream log;
  try {
    run(small_config(), d, log);
    FAIL("expected a lock error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Io);
  }
  CHECK(fs::exists(d / ".lock"));
}

TEST_CASE("command-line exit codes") {
  const fs::path d = scratch("exit_codes");
  write_file(d / "bad.json", R"({"minimize": {"lambdas": [0.5]}})");
  CHECK(run_cli("validate --config " + (d / "bad.json").string()) == 2);
  CHECK(run_cli("minimize --config " + (d / "bad.json").string() + " --out " + (d / "r0").string()) == 2);
  CHECK(run_cli("minimize --out " + (d / "r0").string()) == 2);
  CHECK(run_cli("frobnicate --config " + (d / "bad.json").string()) == 2);

  write_file(d / "ok.json", "{}");
  CHECK(run_cli("validate --config " + (d / "ok.json").string()) == 0);

  write_file(d / "corrupt.ckpt", "not a checkpoint");
  write_file(d / "diag.json", R"({"field": {"source": "checkpoint", "checkpoint": ")" +
                                  (d / "corrupt.ckpt").string() + "\"}}");
  CHECK(run_cli("diagnose --config " + (d / "diag.json").string() + " --out " + (d / "r1").string()) == 3);
  CHECK(fs::exists(d / "r1" / "manifest.json"));

  write_file(d / "prof.json", R"({"profile": {"r_max": 60}})");
  CHECK(run_cli("profile --config " + (d / "prof.json").string() + " --out " + (d / "r2").string()) == 0);
  CHECK(fs::exists(d / "r2" / "profile" / "profile.json"));
}

#include <cstdlib>
#include <iostream>

#include <omp.h>

#include "CLI11.hpp"

#include "gllab/config.hpp"
#include "gllab/error.hpp"
#include "gllab/runner.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitStage = 3;

void apply_thread_env() {
  const char* s = std::getenv(gllab::kThreadsEnv);
  if (!s || !*s) return;
  char* end = nullptr;
  const long n = std::strtol(s, &end, 10);
  if (*end != '\0' || n < 1) {
    std::cerr << "warning: ignoring " << gllab::kThreadsEnv << "=" << s << '\n';
    return;
  }
  omp_set_num_threads(static_cast<int>(n));
}

int run_mode(gllab::Mode mode, const std::string& config_path, const std::string& out) {
  gllab::ValidationResult v = gllab::validate_file(config_path);
  if (!v.ok()) {
    std::cerr << "invalid config " << config_path << ":\n" << gllab::format_errors(v.errors);
    return kExitValidation;
  }
  gllab::ExperimentConfig c = *v.config;
  c.mode = mode;
  if (!out.empty()) c.output_dir = out;
  try {
    const gllab::RunManifest m = gllab::run(c, c.output_dir, std::cout);
    return m.ok ? 0 : kExitStage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitStage;
  }
}

}  // namespace

int main(int argc, char** argv) {
  apply_thread_env();
  CLI::App app{"Ginzburg-Landau hedgehog laboratory"};
  app.set_version_flag("--version", std::string(gllab::kVersion));
  app.require_subcommand(1);

  std::string config, out;
  struct Sub {
    const char* name;
    gllab::Mode mode;
    const char* help;
  };
  const Sub subs[] = {
      {"profile", gllab::Mode::Profile, "solve the radial profile"},
      {"minimize", gllab::Mode::Minimize, "minimize the energy on the unit ball for each lambda"},
      {"diagnose", gllab::Mode::Diagnose, "run every probe on a field"},
      {"blowdown", gllab::Mode::Blowdown, "fit the tangent map of a field"},
      {"pipeline", gllab::Mode::FullPipeline, "profile, minimize, recenter, probes and tables"},
  };
  for (const auto& s : subs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    sub->add_option("--config", config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out, "run directory (overrides output_dir)");
  }
  CLI::App* val = app.add_subcommand("validate", "check a config and print it with defaults filled in");
  val->add_option("--config", config, "experiment config (JSON)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitValidation;
  }

  if (val->parsed()) {
    const gllab::ValidationResult v = gllab::validate_file(config);
    if (!v.ok()) {
      std::cerr << gllab::format_errors(v.errors);
      return kExitValidation;
    }
    std::cout << gllab::to_json(*v.config).dump(2) << '\n';
    return 0;
  }
  for (const auto& s : subs)
    if (app.got_subcommand(s.name)) return run_mode(s.mode, config, out);
  return kExitValidation;
}

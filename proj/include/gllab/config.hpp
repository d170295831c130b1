#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "gllab/ball_minimizer.hpp"

namespace gllab {

enum class Mode { Profile, Minimize, Diagnose, Blowdown, FullPipeline };

Mode parse_mode(const std::string& name);
std::string to_string(Mode mode);

struct ProfileConfig {
  double r_max = 200.0;
  double step = 1e-3;
  double tol = 1e-10;
  bool operator==(const ProfileConfig&) const = default;
};

struct MinimizeConfig {
  std::vector<double> lambdas{5.0, 10.0, 20.0};
  // One entry per lambda, or a single entry used for all.
  std::vector<int> grid_sizes{45, 65, 85};
  ball::Init init = ball::Init::Hedgehog;
  double perturbation = 0.05;
  std::uint64_t seed = 1;
  double grad_tol = 1e-6;
  int max_iterations = 50000;
  double armijo = 1e-4;
  bool project_unit_ball = true;

  int grid_size_for(std::size_t lambda_index) const;
  ball::BallProblem problem(std::size_t lambda_index) const;
  bool operator==(const MinimizeConfig&) const = default;
};

/// Field fed to the diagnose and blowdown modes.
struct FieldSourceConfig {
  enum class Kind { Hedgehog, Checkpoint };
  Kind kind = Kind::Hedgehog;
  std::string checkpoint;
  double lambda = 1.0;
  int n = 65;
  double h = 0.25;
  bool operator==(const FieldSourceConfig&) const = default;
};

struct DiagnoseConfig {
  std::vector<double> deltas{0.5};
  int mesh_level = 4;
  double panel_over_h = 1.0;
  // Probe radii as fractions of the largest admissible radius L - h.
  std::vector<double> radius_fractions{0.125, 0.25, 0.5, 1.0};
  int degree_radii = 5;
  std::vector<double> annulus_fractions{0.25, 1.0};
  bool operator==(const DiagnoseConfig&) const = default;
};

struct RescaleConfig {
  int n = 65;
  double side_fraction = 0.99;  // of lambda (1 - |a|)
  bool operator==(const RescaleConfig&) const = default;
};

struct BlowdownConfig {
  double radius_fraction = 1.0;
  bool recenter = false;
  bool operator==(const BlowdownConfig&) const = default;
};

struct ExperimentConfig {
  Mode mode = Mode::FullPipeline;
  std::string output_dir = "runs/default";
  ProfileConfig profile;
  MinimizeConfig minimize;
  FieldSourceConfig field;
  DiagnoseConfig diagnose;
  RescaleConfig rescale;
  BlowdownConfig blowdown;
  bool operator==(const ExperimentConfig&) const = default;
};

struct ConfigError {
  std::string path;  // JSON path, e.g. $.minimize.lambdas[1]
  std::string message;
};

struct ValidationResult {
  std::optional<ExperimentConfig> config;
  std::vector<ConfigError> errors;
  bool ok() const { return errors.empty(); }
};

/// Every problem is collected; parsing never stops at the first one.
ValidationResult validate_json(const nlohmann::json& doc);
ValidationResult validate_text(const std::string& text);
ValidationResult validate_file(const std::filesystem::path& path);

/// Fully expanded config, defaults included.
nlohmann::json to_json(const ExperimentConfig& c);

std::string format_errors(const std::vector<ConfigError>& errors);

}  // namespace gllab

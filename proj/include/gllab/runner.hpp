#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "gllab/config.hpp"

namespace gllab {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kThreadsEnv = "GLLAB_THREADS";

struct StageRecord {
  std::string name;
  bool ok = false;
  double seconds = 0.0;
  std::string error;
};

struct FileRecord {
  std::string path;  // relative to the run directory
  std::string sha256;
  std::uintmax_t bytes = 0;
};

struct RunManifest {
  nlohmann::json config;
  std::string version = kVersion;
  std::vector<StageRecord> stages;
  std::vector<FileRecord> files;
  bool ok = true;

  nlohmann::json to_json() const;
};

std::string sha256_hex(const std::string& bytes);

/// Runs c.mode inside `out`.  Stages write into out/.staging/<stage> and
/// are renamed to out/<stage> once complete; a failed stage lands in
/// out/<stage>.failed.  manifest.json is written last.  Throws Error(Io)
/// when another process holds out/.lock.
RunManifest run(const ExperimentConfig& c, const std::filesystem::path& out, std::ostream& summary);

}  // namespace gllab

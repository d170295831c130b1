#pragma once

#include <stdexcept>
#include <string>

namespace gllab {

enum class ErrorKind {
  InvalidParameter,
  OutOfRange,
  NumericalFailure,
  DegreeUndefined,
  MeshTooCoarse,
  Io,
};

const char* to_string(ErrorKind kind);

// Single exception type for the library; callers dispatch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidParameter: return "invalid-parameter";
    case ErrorKind::OutOfRange: return "out-of-range";
    case ErrorKind::NumericalFailure: return "numerical-failure";
    case ErrorKind::DegreeUndefined: return "degree-undefined";
    case ErrorKind::MeshTooCoarse: return "mesh-too-coarse";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

}  // namespace gllab

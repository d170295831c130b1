#pragma once

// Field checkpoint: one JSON header line
//   {"n":..,"h":..,"lambda":..,"frozen_count":..,"comment":"..","center":[x,y,z]}\n
// then 3 n^3 little-endian IEEE-754 doubles (node-major, x fastest, three
// components per node), then ceil(n^3 / 8) bytes of frozen mask with node i
// at bit (i % 8) of byte (i / 8), least significant bit first.
// See docs/checkpoint_format.md.

#include <filesystem>
#include <iosfwd>
#include <string>

#include "gllab/grid.hpp"

namespace gllab {

struct Checkpoint {
  VectorField3 field;
  double lambda = 0.0;
  std::string comment;
};

void write_checkpoint(std::ostream& os, const VectorField3& u, double lambda, const std::string& comment = "");
Checkpoint read_checkpoint(std::istream& is);

void save_checkpoint(const std::filesystem::path& path, const VectorField3& u, double lambda,
                     const std::string& comment = "");
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace gllab

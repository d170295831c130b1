#include "gllab/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <vector>

#include "json.hpp"

#include "gllab/error.hpp"

namespace gllab {

namespace {

static_assert(sizeof(double) == 8);

void put_le_double(std::vector<char>& out, double v) {
  std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((bits >> (8 * b)) & 0xFFu));
}

double get_le_double(const unsigned char* p) {
  std::uint64_t bits = 0;
  for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(p[b]) << (8 * b);
  return std::bit_cast<double>(bits);
}

}  // namespace

void write_checkpoint(std::ostream& os, const VectorField3& u, double lambda, const std::string& comment) {
  const Grid3& g = u.grid();
  nlohmann::json header = {{"n", g.n()},
                           {"h", g.h()},
                           {"lambda", lambda},
                           {"frozen_count", u.frozen_count()},
                           {"comment", comment},
                           {"center", {g.center()[0], g.center()[1], g.center()[2]}}};
  os << header.dump() << '\n';

  std::vector<char> buf;
  buf.reserve(8 * u.values().size() + u.node_count() / 8 + 1);
  for (double v : u.values()) put_le_double(buf, v);
  std::vector<unsigned char> mask((u.node_count() + 7) / 8, 0);
  for (std::size_t i = 0; i < u.node_count(); ++i)
    if (u.frozen(i)) mask[i / 8] = static_cast<unsigned char>(mask[i / 8] | (1u << (i % 8)));
  buf.insert(buf.end(), mask.begin(), mask.end());
  os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!os) throw Error(ErrorKind::Io, "checkpoint write failed");
}

Checkpoint read_checkpoint(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw Error(ErrorKind::Io, "checkpoint header missing");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Io, std::string("checkpoint header is not JSON: ") + e.what());
  }
  for (const char* key : {"n", "h", "lambda", "frozen_count", "comment"})
    if (!header.contains(key)) throw Error(ErrorKind::Io, std::string("checkpoint header lacks ") + key);

  Vec3 center{0.0, 0.0, 0.0};
  if (header.contains("center")) {
    const auto& c = header.at("center");
    if (!c.is_array() || c.size() != 3) throw Error(ErrorKind::Io, "checkpoint center must be a 3-array");
    for (std::size_t a = 0; a < 3; ++a) center[a] = c[a].get<double>();
  }
  const Grid3 grid(header.at("n").get<int>(), header.at("h").get<double>(), center);
  Checkpoint cp{VectorField3(grid), header.at("lambda").get<double>(), header.at("comment").get<std::string>()};

  const std::size_t n_values = cp.field.values().size();
  const std::size_t n_mask = (cp.field.node_count() + 7) / 8;
  std::vector<unsigned char> buf(8 * n_values + n_mask);
  is.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (static_cast<std::size_t>(is.gcount()) != buf.size()) throw Error(ErrorKind::Io, "checkpoint payload truncated");

  auto vals = cp.field.values();
  for (std::size_t i = 0; i < n_values; ++i) vals[i] = get_le_double(buf.data() + 8 * i);
  const unsigned char* mask = buf.data() + 8 * n_values;
  for (std::size_t i = 0; i < cp.field.node_count(); ++i) cp.field.set_frozen(i, (mask[i / 8] >> (i % 8)) & 1u);

  if (cp.field.frozen_count() != header.at("frozen_count").get<std::size_t>())
    throw Error(ErrorKind::Io, "checkpoint frozen_count does not match mask");
  return cp;
}

void save_checkpoint(const std::filesystem::path& path, const VectorField3& u, double lambda,
                     const std::string& comment) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorKind::Io, "cannot open " + path.string());
  write_checkpoint(os, u, lambda, comment);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorKind::Io, "cannot open " + path.string());
  return read_checkpoint(is);
}

}  // namespace gllab

#include <cstring>
#include <random>
#include <sstream>

#include "doctest.h"
#include "json.hpp"

#include "gllab/checkpoint.hpp"
#include "gllab/error.hpp"
#include "gllab/field.hpp"

using namespace gllab;

namespace {

VectorField3 sample_field() {
  const Grid3 g(17, 0.125, {0.5, -0.25, 0.0});
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  VectorField3 u(g);
  for (double& x : u.values()) x = d(rng);
  for (std::size_t i = 0; i < g.node_count(); i += 3) u.set_frozen(i, true);
  return u;
}

std::string bytes_of(const VectorField3& u, double lambda, const std::string& comment) {
  std::ostringstream os(std::ios::binary);
  write_checkpoint(os, u, lambda, comment);
  return os.str();
}

}  // namespace

TEST_CASE("checkpoint round trip is exact") {
  const VectorField3 u = sample_field();
  std::istringstream is(bytes_of(u, 7.5, "round trip"), std::ios::binary);
  const Checkpoint c = read_checkpoint(is);
  CHECK(c.field == u);
  CHECK(c.lambda == 7.5);
  CHECK(c.comment == "round trip");
}

TEST_CASE("checkpoint byte layout") {
  const VectorField3 u = sample_field();
  const std::string b = bytes_of(u, 2.0, "layout");
  const std::size_t nl = b.find('\n');
  REQUIRE(nl != std::string::npos);
  const auto header = nlohmann::json::parse(b.substr(0, nl));
  CHECK(header["n"] == 17);
  CHECK(header["h"] == 0.125);
  CHECK(header["lambda"] == 2.0);
  CHECK(header["frozen_count"] == u.frozen_count());
  CHECK(header["comment"] == "layout");
  const std::size_t N = u.node_count();
  REQUIRE(b.size() == nl + 1 + 24 * N + (N + 7) / 8);

  // little-endian doubles, x fastest, three components per node
  const std::size_t node = u.grid().index(2, 1, 0);
  double v = 0.0;
  const auto* p = reinterpret_cast<const unsigned char*>(b.data() + nl + 1 + 24 * node + 8);
  std::uint64_t bits = 0;
  for (int k = 7; k >= 0; --k) bits = (bits << 8) | p[k];
  std::memcpy(&v, &bits, 8);
  CHECK(v == u.at(node)[1]);

  // mask: node i at bit i % 8 of byte i / 8
  const std::size_t mask_at = nl + 1 + 24 * N;
  for (std::size_t i : {std::size_t{0}, std::size_t{1}, std::size_t{3}, std::size_t{4}, N - 1}) {
    const bool bit = (static_cast<unsigned char>(b[mask_at + i / 8]) >> (i % 8)) & 1;
    CHECK(bit == u.frozen(i));
  }
}

TEST_CASE("checkpoint header without center is accepted") {
  const Grid3 g(16, 0.5);
  VectorField3 u = field::constant_field(g, {0.0, 1.0, 0.0});
  std::string b = bytes_of(u, 1.0, "");
  const std::size_t nl = b.find('\n');
  auto header = nlohmann::json::parse(b.substr(0, nl));
  header.erase("center");
  b = header.dump() + b.substr(nl);
  std::istringstream is(b, std::ios::binary);
  const Checkpoint c = read_checkpoint(is);
  CHECK(c.field.grid().center() == Vec3{0.0, 0.0, 0.0});
  CHECK(c.field == u);
}

TEST_CASE("corrupt checkpoints are rejected") {
  const VectorField3 u = sample_field();
  const std::string good = bytes_of(u, 1.0, "x");
  const std::size_t nl = good.find('\n');

  auto rejects = [](const std::string& b) {
    std::istringstream is(b, std::ios::binary);
    try {
      read_checkpoint(is);
    } catch (const Error& e) {
      return e.kind() == ErrorKind::Io;
    }
    return false;
  };
  CHECK(rejects(good.substr(0, good.size() - 5)));
  CHECK(rejects("not json\n" + good.substr(nl + 1)));
  auto header = nlohmann::json::parse(good.substr(0, nl));
  header["frozen_count"] = 1;
  CHECK(rejects(header.dump() + good.substr(nl)));
  header = nlohmann::json::parse(good.substr(0, nl));
  header.erase("lambda");
  CHECK(rejects(header.dump() + good.substr(nl)));
  CHECK(rejects(""));
}

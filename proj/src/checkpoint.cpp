#include "wgnls/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace wgnls {

namespace {

std::uint64_t to_le(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::little) return v;
  return __builtin_bswap64(v);
}

void put_double(std::ostream& os, double x) {
  const auto bits = to_le(std::bit_cast<std::uint64_t>(x));
  char buf[8];
  std::memcpy(buf, &bits, 8);
  os.write(buf, 8);
}

double get_double(std::istream& is) {
  char buf[8];
  if (!is.read(buf, 8)) throw std::runtime_error("checkpoint: truncated body");
  std::uint64_t bits;
  std::memcpy(&bits, buf, 8);
  return std::bit_cast<double>(to_le(bits));
}

}  // namespace

void write_checkpoint(std::ostream& os, const Field& f, double time) {
  const auto& g = f.grid();
  nlohmann::ordered_json h;
  h["version"] = kCheckpointVersion;
  h["d"] = g.d();
  h["n"] = g.n();
  h["L"] = g.half_length();
  h["nx"] = g.nx();
  h["ny"] = g.ny();
  h["space"] = to_string(f.space());
  h["time"] = time;
  os << h.dump() << '\n';
  for (const auto& v : f.values()) {
    put_double(os, v.real());
    put_double(os, v.imag());
  }
  if (!os) throw std::runtime_error("checkpoint: write failed");
}

void write_checkpoint(const std::filesystem::path& path, const Field& f, double time) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("checkpoint: cannot open " + path.string());
  write_checkpoint(os, f, time);
}

Checkpoint read_checkpoint(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("checkpoint: missing header");
  const auto h = nlohmann::json::parse(line);
  if (h.at("version").get<int>() != kCheckpointVersion)
    throw std::runtime_error("checkpoint: unsupported version");
  auto grid = make_grid(h.at("d").get<int>(), h.at("n").get<int>(), h.at("L").get<double>(),
                        h.at("nx").get<int>(), h.at("ny").get<int>());
  Field f(grid, space_from_string(h.at("space").get<std::string>()));
  for (auto& v : f.values()) {
    const double re = get_double(is);
    const double im = get_double(is);
    v = {re, im};
  }
  return {std::move(f), h.at("time").get<double>()};
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("checkpoint: cannot open " + path.string());
  return read_checkpoint(is);
}

}  // namespace wgnls

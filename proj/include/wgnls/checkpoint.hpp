#pragma once

// Binary field snapshots. One UTF-8 JSON header line
//   {"version":1,"d":..,"n":..,"L":..,"nx":..,"ny":..,"space":"physical","time":..}
// followed by size() little-endian float64 (re, im) pairs in grid index order.

#include <filesystem>
#include <iosfwd>

#include "wgnls/grid.hpp"

namespace wgnls {

struct Checkpoint {
  Field field;
  double time = 0.0;
};

inline constexpr int kCheckpointVersion = 1;

void write_checkpoint(std::ostream& os, const Field& f, double time);
void write_checkpoint(const std::filesystem::path& path, const Field& f, double time);

/// Reads a checkpoint, building a fresh grid from the header.
Checkpoint read_checkpoint(std::istream& is);
Checkpoint read_checkpoint(const std::filesystem::path& path);

}  // namespace wgnls

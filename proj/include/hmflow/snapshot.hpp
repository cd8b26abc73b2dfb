#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "hmflow/map_field.hpp"

namespace hmflow {

// SPHM layout, little-endian:
//   "SPHM" | u32 version | u32 N | f64 L | North N*N*(x,y,z f64) | South ...
// Nodes are stored in the in-memory order i + N j.
inline constexpr std::uint32_t kSnapshotVersion = 1;
inline constexpr std::size_t kSnapshotHeaderBytes = 20;

std::string encode_snapshot(const MapField& field);
MapField decode_snapshot(const std::string& bytes, const std::string& origin = "<snapshot>");

/// Writes to a temporary sibling and renames it into place.
void write_snapshot(const std::filesystem::path& path, const MapField& field);
MapField read_snapshot(const std::filesystem::path& path);

/// `run-<id>-t<time>.sphm` with the time printed as %.6f.
std::string snapshot_name(const std::string& run_id, double t);

/// Atomic write helper shared by the output writers.
void write_file_atomic(const std::filesystem::path& path, const std::string& bytes);

}  // namespace hmflow

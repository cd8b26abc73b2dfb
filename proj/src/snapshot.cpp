#include "hmflow/snapshot.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "hmflow/errors.hpp"
#include "hmflow/spec_io.hpp"

namespace hmflow {

static_assert(std::endian::native == std::endian::little, "SPHM I/O assumes a little-endian host");

namespace {

template <typename T>
void put(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

template <typename T>
T get(const std::string& in, std::size_t& pos) {
  T v;
  std::memcpy(&v, in.data() + pos, sizeof(T));
  pos += sizeof(T);
  return v;
}

}  // namespace

std::string encode_snapshot(const MapField& field) {
  const std::size_t count = static_cast<std::size_t>(field.n()) * field.n();
  std::string out;
  out.reserve(kSnapshotHeaderBytes + 2 * count * 24);
  out.append("SPHM", 4);
  put<std::uint32_t>(out, kSnapshotVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(field.n()));
  put<double>(out, field.half_width());
  for (ChartId chart : {ChartId::North, ChartId::South}) {
    for (const auto& v : field.grid(chart).values) {
      put<double>(out, v.x());
      put<double>(out, v.y());
      put<double>(out, v.z());
    }
  }
  return out;
}

MapField decode_snapshot(const std::string& bytes, const std::string& origin) {
  if (bytes.size() < kSnapshotHeaderBytes || bytes.compare(0, 4, "SPHM") != 0) {
    throw Error(ErrorKind::Parse, origin + ": not an SPHM snapshot (bad magic)");
  }
  std::size_t pos = 4;
  const auto version = get<std::uint32_t>(bytes, pos);
  if (version != kSnapshotVersion) {
    throw Error(ErrorKind::Parse, origin + ": unsupported SPHM version " + std::to_string(version));
  }
  const auto n = get<std::uint32_t>(bytes, pos);
  const auto L = get<double>(bytes, pos);
  const std::size_t count = static_cast<std::size_t>(n) * n;
  if (n > 100000 || bytes.size() != kSnapshotHeaderBytes + 2 * count * 24) {
    throw Error(ErrorKind::Parse, origin + ": SPHM size does not match N = " + std::to_string(n));
  }
  MapField field(static_cast<int>(n), L);
  for (ChartId chart : {ChartId::North, ChartId::South}) {
    for (auto& v : field.grid(chart).values) {
      const double x = get<double>(bytes, pos);
      const double y = get<double>(bytes, pos);
      const double z = get<double>(bytes, pos);
      v = Vec3(x, y, z);
    }
  }
  return field;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& bytes) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorKind::Io, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot rename into " + path.string() + ": " + ec.message());
}

void write_snapshot(const std::filesystem::path& path, const MapField& field) {
  write_file_atomic(path, encode_snapshot(field));
}

MapField read_snapshot(const std::filesystem::path& path) {
  return decode_snapshot(read_text_file(path), path.string());
}

std::string snapshot_name(const std::string& run_id, double t) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", t);
  return "run-" + run_id + "-t" + buf + ".sphm";
}

}  // namespace hmflow

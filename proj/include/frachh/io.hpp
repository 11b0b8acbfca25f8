#pragma once

// File formats: CSV exports with 17 significant digits, and the FHHF flat
// binary field format (32-byte header: magic 'FHHF', u32 version, u32 N,
// u32 n, f64 L, u64 value count; then little-endian f64 values).

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "frachh/fbm.hpp"
#include "frachh/field.hpp"
#include "frachh/noise.hpp"

#include "json.hpp"

namespace frachh {

static_assert(std::endian::native == std::endian::little,
              "FHHF binary format assumes a little-endian host");

inline std::string format_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

inline void write_fbm_path_csv(const std::filesystem::path& path, const FbmPath& p) {
  std::string body = "t,value\n";
  for (int i = 0; i <= p.grid.steps(); ++i)
    body += format_g17(p.grid.node(i)) + "," + format_g17(p.values[i]) + "\n";
  write_text_file(path, body);
}

inline void write_field_csv(const std::filesystem::path& path, const Field& f) {
  std::string body;
  const int dim = f.grid.dim();
  body = (dim == 1) ? "x1,value\n" : (dim == 2 ? "x1,x2,value\n" : "x1,x2,x3,value\n");
  for (std::size_t j = 0; j < f.values.size(); ++j) {
    const auto x = f.grid.point(j);
    for (int d = 0; d < dim; ++d) body += format_g17(x[d]) + ",";
    body += format_g17(f.values[j]) + "\n";
  }
  write_text_file(path, body);
}

inline void write_field_binary(const std::filesystem::path& path, const Field& f) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  char header[32] = {};
  std::memcpy(header, "FHHF", 4);
  const std::uint32_t version = 1;
  const std::uint32_t dim = static_cast<std::uint32_t>(f.grid.dim());
  const std::uint32_t n = static_cast<std::uint32_t>(f.grid.n());
  const double half_period = f.grid.half_period();
  const std::uint64_t count = f.values.size();
  std::memcpy(header + 4, &version, 4);
  std::memcpy(header + 8, &dim, 4);
  std::memcpy(header + 12, &n, 4);
  std::memcpy(header + 16, &half_period, 8);
  std::memcpy(header + 24, &count, 8);
  out.write(header, 32);
  out.write(reinterpret_cast<const char*>(f.values.data()),
            static_cast<std::streamsize>(count * sizeof(double)));
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

inline Field read_field_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
  char header[32];
  in.read(header, 32);
  if (!in || std::memcmp(header, "FHHF", 4) != 0)
    throw std::runtime_error("not an FHHF field file: " + path.string());
  std::uint32_t version, dim, n;
  double half_period;
  std::uint64_t count;
  std::memcpy(&version, header + 4, 4);
  std::memcpy(&dim, header + 8, 4);
  std::memcpy(&n, header + 12, 4);
  std::memcpy(&half_period, header + 16, 8);
  std::memcpy(&count, header + 24, 8);
  if (version != 1) throw std::runtime_error("unsupported FHHF version in " + path.string());
  SpatialGrid grid(static_cast<int>(dim), static_cast<int>(n), half_period);
  if (count != grid.size()) throw std::runtime_error("FHHF value count mismatch in " + path.string());
  Field f = Field::zeros(grid);
  in.read(reinterpret_cast<char*>(f.values.data()),
          static_cast<std::streamsize>(count * sizeof(double)));
  if (!in) throw std::runtime_error("truncated FHHF file: " + path.string());
  return f;
}

// One field file per node plus a manifest echoing the grid, spec and seed.
inline void export_convolution_trajectory(const std::filesystem::path& dir,
                                          const ConvolutionTrajectory& z) {
  std::filesystem::create_directories(dir);
  nlohmann::json manifest;
  manifest["format"] = "FHHF trajectory";
  manifest["time"] = {{"T", z.tgrid.horizon()}, {"steps", z.tgrid.steps()}};
  manifest["noise"] = {{"hurst", z.spec.hurst},
                       {"mu", z.spec.mu},
                       {"mode_cutoff", z.spec.mode_cutoff},
                       {"seed", z.spec.seed}};
  manifest["grid"] = {{"N", z.spec.grid.dim()}, {"n", z.spec.grid.n()}, {"L", z.spec.grid.half_period()}};
  manifest["fields"] = nlohmann::json::array();
  for (int i = 0; i < static_cast<int>(z.fields.size()); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "node_%04d.fhhf", i);
    write_field_binary(dir / name, z.fields[i]);
    manifest["fields"].push_back({{"index", i}, {"t", z.tgrid.node(i)}, {"file", name}});
  }
  write_text_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

}  // namespace frachh

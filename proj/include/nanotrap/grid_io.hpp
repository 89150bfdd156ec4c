#pragma once

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "nanotrap/errors.hpp"
#include "nanotrap/landscape.hpp"

namespace nanotrap {

// NANOTRAP-GRID v1: a text header
//
//   NANOTRAP-GRID v1
//   origin <x> <y> <z>
//   spacing <x> <y> <z>
//   counts <nx> <ny> <nz>
//   mode dc|dressed
//   <blank line>
//
// followed by the values as raw little-endian IEEE-754 doubles in x-fastest
// order, then the mask packed LSB-first into bytes in the same order.

namespace grid_io_detail {

inline constexpr std::string_view kMagic = "NANOTRAP-GRID v1";

inline std::uint64_t to_little_endian(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::little) return v;
  std::uint64_t r = 0;
  for (int i = 0; i < 8; ++i) r |= ((v >> (8 * i)) & 0xff) << (8 * (7 - i));
  return r;
}

inline void append_double(std::string& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

inline std::string read_line(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("grid file: unexpected end of header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

inline double parse_header_double(const std::string& token) {
  char* end = nullptr;
  const double v = std::strtod(token.c_str(), &end);
  if (end == token.c_str() || *end != '\0')
    throw FormatError("grid file: malformed header number '" + token + "'");
  return v;
}

inline std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

}  // namespace grid_io_detail

inline void write_grid(const PotentialGrid& grid, std::ostream& out) {
  using namespace grid_io_detail;
  grid.validate();
  std::string header{kMagic};
  header += "\norigin";
  for (int a = 0; a < 3; ++a) {
    header += ' ';
    append_double(header, grid.spec.origin[a]);
  }
  header += "\nspacing";
  for (int a = 0; a < 3; ++a) {
    header += ' ';
    append_double(header, grid.spec.spacing[a]);
  }
  header += "\ncounts";
  for (int a = 0; a < 3; ++a) header += ' ' + std::to_string(grid.spec.counts[a]);
  header += "\nmode ";
  header += to_string(grid.mode);
  header += "\n\n";
  out.write(header.data(), static_cast<std::streamsize>(header.size()));

  for (double v : grid.values) {
    const std::uint64_t le = to_little_endian(std::bit_cast<std::uint64_t>(v));
    out.write(reinterpret_cast<const char*>(&le), 8);
  }
  const std::size_t n = grid.values.size();
  std::vector<std::uint8_t> packed((n + 7) / 8, 0);
  for (std::size_t f = 0; f < n; ++f)
    if (grid.mask[f]) packed[f / 8] |= static_cast<std::uint8_t>(1u << (f % 8));
  out.write(reinterpret_cast<const char*>(packed.data()),
            static_cast<std::streamsize>(packed.size()));
  if (!out) throw FormatError("grid file: write failed");
}

inline PotentialGrid read_grid(std::istream& in) {
  using namespace grid_io_detail;
  if (read_line(in) != kMagic) throw FormatError("grid file: bad magic line");
  PotentialGrid grid;

  auto vec_line = [&](const char* name) {
    const auto fields = split_fields(read_line(in));
    if (fields.size() != 4 || fields[0] != name)
      throw FormatError(std::string("grid file: expected '") + name + " x y z'");
    return Vec3{parse_header_double(fields[1]), parse_header_double(fields[2]),
                parse_header_double(fields[3])};
  };
  grid.spec.origin = vec_line("origin");
  grid.spec.spacing = vec_line("spacing");

  const auto counts = split_fields(read_line(in));
  if (counts.size() != 4 || counts[0] != "counts")
    throw FormatError("grid file: expected 'counts nx ny nz'");
  for (int a = 0; a < 3; ++a) {
    const double v = parse_header_double(counts[a + 1]);
    if (v != static_cast<int>(v) || v < 2) throw FormatError("grid file: bad counts");
    grid.spec.counts[a] = static_cast<int>(v);
  }

  const auto mode = split_fields(read_line(in));
  if (mode.size() != 2 || mode[0] != "mode" || (mode[1] != "dc" && mode[1] != "dressed"))
    throw FormatError("grid file: expected 'mode dc|dressed'");
  grid.mode = mode[1] == "dc" ? PotentialMode::Dc : PotentialMode::Dressed;
  if (!read_line(in).empty()) throw FormatError("grid file: expected blank line after header");

  grid.spec.validate();
  const std::size_t n = grid.spec.size();
  grid.values.resize(n);
  for (std::size_t f = 0; f < n; ++f) {
    std::uint64_t le;
    in.read(reinterpret_cast<char*>(&le), 8);
    if (!in) throw FormatError("grid file: truncated value payload");
    grid.values[f] = std::bit_cast<double>(to_little_endian(le));
  }
  std::vector<std::uint8_t> packed((n + 7) / 8);
  in.read(reinterpret_cast<char*>(packed.data()), static_cast<std::streamsize>(packed.size()));
  if (!in) throw FormatError("grid file: truncated mask payload");
  grid.mask.assign(n, 0);
  for (std::size_t f = 0; f < n; ++f)
    grid.mask[f] = (packed[f / 8] >> (f % 8)) & 1u;
  if (in.get() != std::istream::traits_type::eof())
    throw FormatError("grid file: trailing data after mask");
  grid.validate();
  return grid;
}

}  // namespace nanotrap

#pragma once

// MPS file formats.
//
// Binary container (all integers and doubles little-endian):
//   magic "FOLDTNMP" (8 bytes), u32 version (=1), u32 reserved (=0)
//   u64 n_sites
//   u64 dim, then dim complex values          left boundary
//   u64 dim, then dim complex values          right boundary
//   per site: u64 left_dim, u64 phys, u64 right_dim, then the entries ordered
//             by physical index, then column, then row (column-major per matrix)
// A complex value is two doubles (re, im). Folded sites use index
// s_f + 2 * s_r (forward fastest).
//
// The text dump writes the same layout with one value per line at 17
// significant digits, so it round-trips exactly.

#include <cstdint>
#include <filesystem>
#include <iosfwd>

#include "foldtn/mps.hpp"

namespace foldtn::mps_io {

inline constexpr std::uint32_t kFormatVersion = 1;

void write_binary(std::ostream& out, const MatrixProductState& s);
MatrixProductState read_binary(std::istream& in);

void save(const std::filesystem::path& path, const MatrixProductState& s);
MatrixProductState load(const std::filesystem::path& path);

void write_text(std::ostream& out, const MatrixProductState& s);
MatrixProductState read_text(std::istream& in);

}  // namespace foldtn::mps_io

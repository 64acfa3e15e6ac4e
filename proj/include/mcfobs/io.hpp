#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "mcfobs/geometry.hpp"
#include "mcfobs/grid.hpp"

namespace mcfobs {

/// Columns polyline_id, vertex_index, x, y.
void write_contour_csv(const std::filesystem::path& path, const Contour& c);
/// Inverse of write_contour_csv; a polyline whose last point repeats its
/// first is marked closed.
Contour read_contour_csv(const std::filesystem::path& path);

/// Binary PGM (P5): 0 outside, 255 inside. Row j = 0 is written last so the
/// image is not upside down in viewers.
void write_mask_pgm(const std::filesystem::path& path, const RegionMask& m);

/// Reads a P5 or P2 image; pixels >= 128 are inside. The grid must match the
/// image size.
RegionMask read_mask_pgm(const std::filesystem::path& path, const Grid2& grid);

/// Text header line "nx ny spacing origin_x origin_y" followed by nx*ny
/// little-endian float32 values, row-major.
void write_field_raw(const std::filesystem::path& path, const ScalarField& f);
ScalarField read_field_raw(const std::filesystem::path& path);

/// FNV-1a 64-bit hash of a file's bytes, as 16 lowercase hex digits.
std::string file_hash(const std::filesystem::path& path);
std::uint64_t fnv1a64(const void* data, std::size_t n, std::uint64_t seed = 14695981039346656037ULL);

}  // namespace mcfobs

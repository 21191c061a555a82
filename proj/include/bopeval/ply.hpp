#pragma once

#include "bopeval/geometry.hpp"

#include <filesystem>
#include <istream>
#include <ostream>

namespace bopeval {

enum class PlyFormat { Ascii, BinaryLittleEndian };

// Reads a PLY mesh: `element vertex` with x/y/z and `element face` with an
// index list (`vertex_indices` or `vertex_index`). Extra properties and
// elements are parsed and ignored. Polygons are fan-triangulated from their
// first index. Big-endian files are rejected. Throws InputError.
TriangleMesh read_ply(std::istream& in);
TriangleMesh load_mesh(const std::filesystem::path& path);

void write_ply(std::ostream& out, const TriangleMesh& mesh,
               PlyFormat format = PlyFormat::Ascii);
void save_mesh(const std::filesystem::path& path, const TriangleMesh& mesh,
               PlyFormat format = PlyFormat::Ascii);

}  // namespace bopeval

#include "bopeval/ply.hpp"

#include "bopeval/error.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace bopeval {
namespace {

static_assert(std::endian::native == std::endian::little,
              "binary PLY reading assumes a little-endian host");

enum class ScalarType { Int8, UInt8, Int16, UInt16, Int32, UInt32, Float32, Float64 };

std::optional<ScalarType> parse_scalar_type(const std::string& name) {
  if (name == "char" || name == "int8") return ScalarType::Int8;
  if (name == "uchar" || name == "uint8") return ScalarType::UInt8;
  if (name == "short" || name == "int16") return ScalarType::Int16;
  if (name == "ushort" || name == "uint16") return ScalarType::UInt16;
  if (name == "int" || name == "int32") return ScalarType::Int32;
  if (name == "uint" || name == "uint32") return ScalarType::UInt32;
  if (name == "float" || name == "float32") return ScalarType::Float32;
  if (name == "double" || name == "float64") return ScalarType::Float64;
  return std::nullopt;
}

bool is_integral(ScalarType t) {
  return t != ScalarType::Float32 && t != ScalarType::Float64;
}

struct Property {
  std::string name;
  ScalarType type = ScalarType::Float32;
  bool is_list = false;
  ScalarType count_type = ScalarType::UInt8;
};

struct Element {
  std::string name;
  std::size_t count = 0;
  std::vector<Property> properties;
};

struct Header {
  bool binary = false;
  std::vector<Element> elements;
};

[[noreturn]] void fail(const std::string& what) {
  throw InputError("PLY: " + what);
}

Header read_header(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("ply", 0) != 0) {
    fail("missing 'ply' magic line");
  }
  Header header;
  bool have_format = false;
  while (true) {
    if (!std::getline(in, line)) fail("unexpected end of header");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::string keyword;
    ls >> keyword;
    if (keyword.empty() || keyword == "comment" || keyword == "obj_info") {
      continue;
    }
    if (keyword == "end_header") break;
    if (keyword == "format") {
      std::string kind, version;
      ls >> kind >> version;
      if (kind == "ascii") {
        header.binary = false;
      } else if (kind == "binary_little_endian") {
        header.binary = true;
      } else if (kind == "binary_big_endian") {
        fail("big-endian binary files are not supported");
      } else {
        fail("unknown format '" + kind + "'");
      }
      have_format = true;
    } else if (keyword == "element") {
      Element e;
      long long count = -1;
      ls >> e.name >> count;
      if (e.name.empty() || count < 0 || ls.fail()) fail("malformed element line: " + line);
      e.count = static_cast<std::size_t>(count);
      header.elements.push_back(std::move(e));
    } else if (keyword == "property") {
      if (header.elements.empty()) fail("property before any element");
      Property p;
      std::string type;
      ls >> type;
      if (type == "list") {
        std::string count_type, item_type;
        ls >> count_type >> item_type >> p.name;
        auto ct = parse_scalar_type(count_type);
        auto it = parse_scalar_type(item_type);
        if (!ct || !it || !is_integral(*ct) || p.name.empty()) {
          fail("malformed list property: " + line);
        }
        p.is_list = true;
        p.count_type = *ct;
        p.type = *it;
      } else {
        ls >> p.name;
        auto t = parse_scalar_type(type);
        if (!t || p.name.empty()) fail("malformed property: " + line);
        p.type = *t;
      }
      header.elements.back().properties.push_back(std::move(p));
    } else {
      fail("unknown header keyword '" + keyword + "'");
    }
  }
  if (!have_format) fail("missing format line");
  return header;
}

// Token source shared by the ASCII and binary paths.
class ValueReader {
 public:
  ValueReader(std::istream& in, bool binary) : in_(in), binary_(binary) {}

  double read(ScalarType type) {
    return binary_ ? read_binary(type) : read_ascii();
  }

  // Called at the end of each ASCII element row.
  void end_row() {
    if (binary_) return;
    std::string rest;
    std::getline(in_, rest);
  }

 private:
  template <typename T>
  double read_raw() {
    T v;
    in_.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in_) fail("unexpected end of binary data");
    return static_cast<double>(v);
  }

  double read_binary(ScalarType type) {
    switch (type) {
      case ScalarType::Int8: return read_raw<std::int8_t>();
      case ScalarType::UInt8: return read_raw<std::uint8_t>();
      case ScalarType::Int16: return read_raw<std::int16_t>();
      case ScalarType::UInt16: return read_raw<std::uint16_t>();
      case ScalarType::Int32: return read_raw<std::int32_t>();
      case ScalarType::UInt32: return read_raw<std::uint32_t>();
      case ScalarType::Float32: return read_raw<float>();
      case ScalarType::Float64: return read_raw<double>();
    }
    fail("unreachable scalar type");
  }

  double read_ascii() {
    std::string token;
    if (!(in_ >> token)) fail("unexpected end of ASCII data");
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc() || ptr != token.data() + token.size()) {
      fail("non-numeric value '" + token + "'");
    }
    return v;
  }

  std::istream& in_;
  bool binary_;
};

std::uint32_t to_index(double v, std::size_t vertex_count) {
  if (!(v >= 0.0) || v != std::floor(v) ||
      v >= static_cast<double>(vertex_count)) {
    fail("face index " + std::to_string(static_cast<long long>(v)) +
         " out of range (vertex count " + std::to_string(vertex_count) + ")");
  }
  return static_cast<std::uint32_t>(v);
}

}  // namespace

TriangleMesh read_ply(std::istream& in) {
  const Header header = read_header(in);
  ValueReader reader(in, header.binary);

  PointList vertices;
  std::vector<Triangle> triangles;
  bool have_vertices = false;

  for (const Element& element : header.elements) {
    if (element.name == "vertex") {
      int ix = -1, iy = -1, iz = -1;
      for (int i = 0; i < static_cast<int>(element.properties.size()); ++i) {
        const auto& p = element.properties[i];
        if (p.is_list) continue;
        if (p.name == "x") ix = i;
        if (p.name == "y") iy = i;
        if (p.name == "z") iz = i;
      }
      if (ix < 0 || iy < 0 || iz < 0) fail("vertex element lacks x/y/z");
      vertices.reserve(element.count);
      std::vector<double> row(element.properties.size());
      for (std::size_t r = 0; r < element.count; ++r) {
        for (std::size_t i = 0; i < element.properties.size(); ++i) {
          const auto& p = element.properties[i];
          if (p.is_list) {
            const double n = reader.read(p.count_type);
            for (long long k = 0; k < static_cast<long long>(n); ++k) reader.read(p.type);
          } else {
            row[i] = reader.read(p.type);
          }
        }
        reader.end_row();
        vertices.emplace_back(row[ix], row[iy], row[iz]);
      }
      have_vertices = true;
    } else if (element.name == "face") {
      if (!have_vertices) fail("face element precedes vertex element");
      int list_idx = -1;
      for (int i = 0; i < static_cast<int>(element.properties.size()); ++i) {
        const auto& p = element.properties[i];
        if (!p.is_list) continue;
        if (p.name == "vertex_indices" || p.name == "vertex_index") {
          list_idx = i;
          break;
        }
        if (list_idx < 0) list_idx = i;
      }
      if (list_idx < 0) fail("face element lacks an index list");
      triangles.reserve(element.count);
      std::vector<std::uint32_t> poly;
      for (std::size_t r = 0; r < element.count; ++r) {
        for (int i = 0; i < static_cast<int>(element.properties.size()); ++i) {
          const auto& p = element.properties[i];
          if (!p.is_list) {
            reader.read(p.type);
            continue;
          }
          const double n = reader.read(p.count_type);
          if (i != list_idx) {
            for (long long k = 0; k < static_cast<long long>(n); ++k) reader.read(p.type);
            continue;
          }
          if (n < 3) {
            fail("face " + std::to_string(r) + " has fewer than 3 indices");
          }
          poly.clear();
          for (long long k = 0; k < static_cast<long long>(n); ++k) {
            poly.push_back(to_index(reader.read(p.type), vertices.size()));
          }
          for (std::size_t k = 1; k + 1 < poly.size(); ++k) {
            triangles.push_back({poly[0], poly[k], poly[k + 1]});
          }
        }
        reader.end_row();
      }
    } else {
      for (std::size_t r = 0; r < element.count; ++r) {
        for (const auto& p : element.properties) {
          if (p.is_list) {
            const double n = reader.read(p.count_type);
            for (long long k = 0; k < static_cast<long long>(n); ++k) reader.read(p.type);
          } else {
            reader.read(p.type);
          }
        }
        reader.end_row();
      }
    }
  }
  if (!have_vertices) fail("no vertex element");
  return TriangleMesh(std::move(vertices), std::move(triangles));
}

TriangleMesh load_mesh(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open mesh file " + path.string());
  try {
    return read_ply(in);
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

void write_ply(std::ostream& out, const TriangleMesh& mesh, PlyFormat format) {
  const bool binary = format == PlyFormat::BinaryLittleEndian;
  out << "ply\n"
      << "format " << (binary ? "binary_little_endian" : "ascii") << " 1.0\n"
      << "element vertex " << mesh.vertices().size() << "\n"
      << "property double x\nproperty double y\nproperty double z\n"
      << "element face " << mesh.triangles().size() << "\n"
      << "property list uchar int vertex_indices\n"
      << "end_header\n";
  if (binary) {
    for (const Vec3& v : mesh.vertices()) {
      out.write(reinterpret_cast<const char*>(v.data()), 3 * sizeof(double));
    }
    for (const Triangle& t : mesh.triangles()) {
      const std::uint8_t n = 3;
      out.write(reinterpret_cast<const char*>(&n), 1);
      for (auto idx : t) {
        const auto i = static_cast<std::int32_t>(idx);
        out.write(reinterpret_cast<const char*>(&i), sizeof(i));
      }
    }
    return;
  }
  char buf[64];
  for (const Vec3& v : mesh.vertices()) {
    for (int k = 0; k < 3; ++k) {
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v[k]);
      out.write(buf, ptr - buf);
      out << (k == 2 ? '\n' : ' ');
    }
  }
  for (const Triangle& t : mesh.triangles()) {
    out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  }
}

void save_mesh(const std::filesystem::path& path, const TriangleMesh& mesh,
               PlyFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write mesh file " + path.string());
  write_ply(out, mesh, format);
}

}  // namespace bopeval

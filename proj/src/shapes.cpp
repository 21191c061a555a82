#include "bopeval/shapes.hpp"

#include "bopeval/error.hpp"

#include <cmath>
#include <numbers>

namespace bopeval {

namespace {

// Orients every triangle so its normal points away from `center`.
void orient_outward(const PointList& v, std::vector<Triangle>& tris, const Vec3& center) {
  for (Triangle& t : tris) {
    const Vec3 n = (v[t[1]] - v[t[0]]).cross(v[t[2]] - v[t[0]]);
    const Vec3 c = (v[t[0]] + v[t[1]] + v[t[2]]) / 3.0;
    if (n.dot(c - center) < 0.0) std::swap(t[1], t[2]);
  }
}

std::uint32_t index(std::size_t i) { return static_cast<std::uint32_t>(i); }

}  // namespace

TriangleMesh make_box(double sx, double sy, double sz, int subdivisions) {
  if (!(sx > 0.0 && sy > 0.0 && sz > 0.0) || subdivisions < 1) {
    throw InputError("make_box: sizes and subdivisions must be positive");
  }
  const Vec3 half(sx / 2, sy / 2, sz / 2);
  PointList v;
  std::vector<Triangle> tris;
  const int n = subdivisions;
  for (int axis = 0; axis < 3; ++axis) {
    const int a = (axis + 1) % 3;
    const int b = (axis + 2) % 3;
    for (double side : {-1.0, 1.0}) {
      const std::size_t base = v.size();
      for (int i = 0; i <= n; ++i) {
        for (int j = 0; j <= n; ++j) {
          Vec3 p;
          p[axis] = side * half[axis];
          p[a] = -half[a] + 2.0 * half[a] * i / n;
          p[b] = -half[b] + 2.0 * half[b] * j / n;
          v.push_back(p);
        }
      }
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          const std::size_t p00 = base + i * (n + 1) + j;
          const std::size_t p01 = p00 + 1;
          const std::size_t p10 = p00 + (n + 1);
          const std::size_t p11 = p10 + 1;
          tris.push_back({index(p00), index(p10), index(p11)});
          tris.push_back({index(p00), index(p11), index(p01)});
        }
      }
    }
  }
  orient_outward(v, tris, Vec3::Zero());
  return TriangleMesh(std::move(v), std::move(tris));
}

TriangleMesh make_cylinder(double radius, double height, int segments) {
  if (!(radius > 0.0 && height > 0.0) || segments < 3) {
    throw InputError("make_cylinder: invalid dimensions");
  }
  PointList v;
  for (double z : {-height / 2, height / 2}) {
    for (int i = 0; i < segments; ++i) {
      const double a = 2.0 * std::numbers::pi * i / segments;
      v.emplace_back(radius * std::cos(a), radius * std::sin(a), z);
    }
  }
  const std::size_t bottom = v.size();
  v.emplace_back(0.0, 0.0, -height / 2);
  const std::size_t top = v.size();
  v.emplace_back(0.0, 0.0, height / 2);

  std::vector<Triangle> tris;
  const auto s = static_cast<std::size_t>(segments);
  for (std::size_t i = 0; i < s; ++i) {
    const std::size_t j = (i + 1) % s;
    tris.push_back({index(i), index(j), index(s + j)});
    tris.push_back({index(i), index(s + j), index(s + i)});
    tris.push_back({index(bottom), index(j), index(i)});
    tris.push_back({index(top), index(s + i), index(s + j)});
  }
  orient_outward(v, tris, Vec3::Zero());
  return TriangleMesh(std::move(v), std::move(tris));
}

TriangleMesh make_uv_sphere(double radius, int stacks, int slices) {
  if (!(radius > 0.0) || stacks < 2 || slices < 3) {
    throw InputError("make_uv_sphere: invalid dimensions");
  }
  PointList v;
  v.emplace_back(0.0, 0.0, radius);
  for (int i = 1; i < stacks; ++i) {
    const double polar = std::numbers::pi * i / stacks;
    for (int j = 0; j < slices; ++j) {
      const double az = 2.0 * std::numbers::pi * j / slices;
      v.emplace_back(radius * std::sin(polar) * std::cos(az),
                     radius * std::sin(polar) * std::sin(az), radius * std::cos(polar));
    }
  }
  v.emplace_back(0.0, 0.0, -radius);
  const std::size_t south = v.size() - 1;

  std::vector<Triangle> tris;
  auto ring = [&](int i, int j) { return index(1 + std::size_t(i) * slices + (j % slices)); };
  for (int j = 0; j < slices; ++j) tris.push_back({0, ring(0, j), ring(0, j + 1)});
  for (int i = 0; i + 1 < stacks - 1; ++i) {
    for (int j = 0; j < slices; ++j) {
      tris.push_back({ring(i, j), ring(i + 1, j), ring(i + 1, j + 1)});
      tris.push_back({ring(i, j), ring(i + 1, j + 1), ring(i, j + 1)});
    }
  }
  for (int j = 0; j < slices; ++j) {
    tris.push_back({index(south), ring(stacks - 2, j + 1), ring(stacks - 2, j)});
  }
  orient_outward(v, tris, Vec3::Zero());
  return TriangleMesh(std::move(v), std::move(tris));
}

TriangleMesh make_tetrahedron(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
  const Vec3 center = (a + b + c + d) / 4.0;
  PointList v{a - center, b - center, c - center, d - center};
  std::vector<Triangle> tris{{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}};
  orient_outward(v, tris, Vec3::Zero());
  return TriangleMesh(std::move(v), std::move(tris));
}

TriangleMesh make_scalene_tetrahedron(double scale) {
  return make_tetrahedron(Vec3(0, 0, 0) * scale, Vec3(150, 0, 0) * scale,
                          Vec3(40, 80, 0) * scale, Vec3(10, 30, 60) * scale);
}

TriangleMesh make_quad(double size) {
  if (!(size > 0.0)) throw InputError("make_quad: size must be positive");
  const double h = size / 2;
  PointList v{{-h, -h, 0.0}, {h, -h, 0.0}, {h, h, 0.0}, {-h, h, 0.0}};
  std::vector<Triangle> tris{{0, 2, 1}, {0, 3, 2}};
  return TriangleMesh(std::move(v), std::move(tris));
}

}  // namespace bopeval

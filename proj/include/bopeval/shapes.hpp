#pragma once

#include "bopeval/geometry.hpp"

namespace bopeval {

// Closed, outward-facing meshes centered at the origin (mm).

// Axis-aligned box; each face is split into an n x n grid of quads.
TriangleMesh make_box(double sx, double sy, double sz, int subdivisions = 1);

// Prism over a regular `segments`-gon about the Z axis, with capped ends.
TriangleMesh make_cylinder(double radius, double height, int segments);

// Latitude/longitude sphere.
TriangleMesh make_uv_sphere(double radius, int stacks, int slices);

// Tetrahedron on four points, re-centered on their centroid.
TriangleMesh make_tetrahedron(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d);

// A tetrahedron with pairwise distinct edge lengths.
TriangleMesh make_scalene_tetrahedron(double scale = 1.0);

// Square in the Z = 0 plane facing -Z (towards a camera at the origin when
// placed at positive Z).
TriangleMesh make_quad(double size);

}  // namespace bopeval

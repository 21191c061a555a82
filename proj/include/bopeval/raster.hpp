#pragma once

#include "bopeval/geometry.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace bopeval {

// Row-major scalar image. Value 0 means "no measurement / background".
template <typename Tag>
struct ScalarMap {
  int width = 0;
  int height = 0;
  std::vector<double> values;

  ScalarMap() = default;
  ScalarMap(int w, int h) : width(w), height(h), values(std::size_t(w) * h, 0.0) {}

  double& at(int u, int v) { return values[std::size_t(v) * width + u]; }
  double at(int u, int v) const { return values[std::size_t(v) * width + u]; }
  std::size_t size() const { return values.size(); }
  bool same_shape(int w, int h) const { return width == w && height == h; }
  template <typename Other>
  bool same_shape(const ScalarMap<Other>& o) const {
    return width == o.width && height == o.height;
  }
  bool operator==(const ScalarMap&) const = default;
};

struct DistanceTag {};
struct DepthTag {};

// Per-pixel distance from the camera center to the surface (mm).
using DistanceMap = ScalarMap<DistanceTag>;
// Per-pixel Z coordinate of the surface (mm).
using DepthMap = ScalarMap<DepthTag>;

struct RenderOptions {
  double near_plane = 10.0;  // mm
};

// Z-buffered rasterization of `mesh` in `pose` under the pinhole model.
//
// Pixel (u, v) covers [u - 0.5, u + 0.5) x [v - 0.5, v + 0.5) in projected
// coordinates, i.e. its center is the projected point (u, v); this keeps
// render_depth_map and depth_to_distance consistent pixel for pixel. Shared
// edges follow the top-left rule. Each covered pixel stores the exact
// intersection of its center ray with the triangle plane, which equals
// perspective-correct interpolation of camera-space coordinates. Triangles
// are clipped at the near plane and against the image rectangle.
DistanceMap render_distance_map(const TriangleMesh& mesh,
                                const RigidTransform& pose,
                                const CameraIntrinsics& cam,
                                const RenderOptions& options = {});
DepthMap render_depth_map(const TriangleMesh& mesh, const RigidTransform& pose,
                          const CameraIntrinsics& cam,
                          const RenderOptions& options = {});

// Renders several posed meshes into one Z-buffer (used to synthesize scenes).
struct PosedMesh {
  const TriangleMesh* mesh;
  RigidTransform pose;
};
DepthMap render_scene_depth(std::span<const PosedMesh> objects,
                            const CameraIntrinsics& cam,
                            const RenderOptions& options = {});

// distance(u, v) = depth(u, v) * |((u - cx) / fx, (v - cy) / fy, 1)|.
DistanceMap depth_to_distance(const DepthMap& depth, const CameraIntrinsics& cam);

// (u, v) = (fx X / Z + cx, fy Y / Z + cy). Throws InputError naming the first
// point with Z <= 0.
PixelList project_points(std::span<const Vec3> pts, const CameraIntrinsics& cam);

}  // namespace bopeval

#include "bopeval/raster.hpp"

#include "bopeval/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <tuple>

namespace bopeval {
namespace {

// Z-buffer over the image; +inf marks uncovered pixels.
struct ZBuffer {
  int width;
  int height;
  std::vector<double> z;

  ZBuffer(int w, int h)
      : width(w), height(h),
        z(std::size_t(w) * h, std::numeric_limits<double>::infinity()) {}
};

Vec3 pixel_ray(double u, double v, const CameraIntrinsics& cam) {
  return {(u - cam.cx) / cam.fx, (v - cam.cy) / cam.fy, 1.0};
}

// Edge function evaluated with canonically ordered endpoints, so the two
// triangles sharing an edge get bit-identical magnitudes with opposite signs.
double edge(const Vec2& a, const Vec2& b, double px, double py) {
  const bool swap = std::tie(b.x(), b.y()) < std::tie(a.x(), a.y());
  const Vec2& p = swap ? b : a;
  const Vec2& q = swap ? a : b;
  const double e = (q.x() - p.x()) * (py - p.y()) - (q.y() - p.y()) * (px - p.x());
  return swap ? -e : e;
}

// Ownership of pixels lying exactly on an edge: for a consistently oriented
// triangle, an edge a->b owns its boundary when it goes "up" or is horizontal
// going right. The reversed edge of a neighbour never satisfies both.
bool owns_boundary(const Vec2& a, const Vec2& b) {
  const double dy = b.y() - a.y();
  const double dx = b.x() - a.x();
  return dy < 0.0 || (dy == 0.0 && dx > 0.0);
}

void raster_triangle(const std::array<Vec3, 3>& tri, const CameraIntrinsics& cam,
                     ZBuffer& zb) {
  std::array<Vec2, 3> p;
  for (int i = 0; i < 3; ++i) {
    p[i] = {cam.fx * tri[i].x() / tri[i].z() + cam.cx,
            cam.fy * tri[i].y() / tri[i].z() + cam.cy};
  }
  double area = edge(p[0], p[1], p[2].x(), p[2].y());
  std::array<int, 3> order{0, 1, 2};
  if (area == 0.0 || !std::isfinite(area)) return;
  if (area < 0.0) std::swap(order[1], order[2]);
  const Vec2& a = p[order[0]];
  const Vec2& b = p[order[1]];
  const Vec2& c = p[order[2]];

  const Vec3 normal = (tri[1] - tri[0]).cross(tri[2] - tri[0]);
  const double plane = normal.dot(tri[0]);

  const double min_x = std::min({a.x(), b.x(), c.x()});
  const double max_x = std::max({a.x(), b.x(), c.x()});
  const double min_y = std::min({a.y(), b.y(), c.y()});
  const double max_y = std::max({a.y(), b.y(), c.y()});
  const int u0 = std::max(0, static_cast<int>(std::ceil(std::max(min_x, -1.0))));
  const int v0 = std::max(0, static_cast<int>(std::ceil(std::max(min_y, -1.0))));
  const int u1 = std::min(zb.width - 1,
                          static_cast<int>(std::floor(std::min(max_x, double(zb.width)))));
  const int v1 = std::min(zb.height - 1,
                          static_cast<int>(std::floor(std::min(max_y, double(zb.height)))));

  const bool own_ab = owns_boundary(a, b);
  const bool own_bc = owns_boundary(b, c);
  const bool own_ca = owns_boundary(c, a);

  for (int v = v0; v <= v1; ++v) {
    for (int u = u0; u <= u1; ++u) {
      const double px = u, py = v;
      const double w0 = edge(a, b, px, py);
      const double w1 = edge(b, c, px, py);
      const double w2 = edge(c, a, px, py);
      const bool inside = (w0 > 0.0 || (w0 == 0.0 && own_ab)) &&
                          (w1 > 0.0 || (w1 == 0.0 && own_bc)) &&
                          (w2 > 0.0 || (w2 == 0.0 && own_ca));
      if (!inside) continue;
      const double denom = normal.dot(pixel_ray(px, py, cam));
      if (denom == 0.0) continue;
      const double z = plane / denom;
      if (!(z > 0.0)) continue;
      double& slot = zb.z[std::size_t(v) * zb.width + u];
      if (z < slot) slot = z;
    }
  }
}

// Sutherland-Hodgman against Z >= near; yields 0, 3 or 4 vertices.
int clip_near(const std::array<Vec3, 3>& in, double near, std::array<Vec3, 4>& out) {
  int n = 0;
  for (int i = 0; i < 3; ++i) {
    const Vec3& cur = in[i];
    const Vec3& nxt = in[(i + 1) % 3];
    const bool cur_in = cur.z() >= near;
    const bool nxt_in = nxt.z() >= near;
    if (cur_in) out[n++] = cur;
    if (cur_in != nxt_in) {
      const double t = (near - cur.z()) / (nxt.z() - cur.z());
      Vec3 x = cur + t * (nxt - cur);
      x.z() = near;
      out[n++] = x;
    }
  }
  return n;
}

void raster_mesh(const TriangleMesh& mesh, const RigidTransform& pose,
                 const CameraIntrinsics& cam, const RenderOptions& options,
                 ZBuffer& zb) {
  const PointList cam_pts = transform_points(pose, mesh.vertices());
  std::array<Vec3, 4> clipped;
  for (const Triangle& t : mesh.triangles()) {
    const std::array<Vec3, 3> tri{cam_pts[t[0]], cam_pts[t[1]], cam_pts[t[2]]};
    if (tri[0].z() < options.near_plane && tri[1].z() < options.near_plane &&
        tri[2].z() < options.near_plane) {
      continue;
    }
    const int n = clip_near(tri, options.near_plane, clipped);
    for (int k = 1; k + 1 < n; ++k) {
      raster_triangle({clipped[0], clipped[k], clipped[k + 1]}, cam, zb);
    }
  }
}

void check_inputs(const CameraIntrinsics& cam, const RenderOptions& options) {
  cam.validate();
  if (!(options.near_plane > 0.0)) {
    throw InputError("near plane must be positive");
  }
}

DepthMap to_depth(const ZBuffer& zb) {
  DepthMap out(zb.width, zb.height);
  for (std::size_t i = 0; i < zb.z.size(); ++i) {
    if (std::isfinite(zb.z[i])) out.values[i] = zb.z[i];
  }
  return out;
}

}  // namespace

DepthMap render_depth_map(const TriangleMesh& mesh, const RigidTransform& pose,
                          const CameraIntrinsics& cam,
                          const RenderOptions& options) {
  check_inputs(cam, options);
  if (mesh.empty()) throw InputError("cannot render an empty mesh");
  ZBuffer zb(cam.width, cam.height);
  raster_mesh(mesh, pose, cam, options, zb);
  return to_depth(zb);
}

DistanceMap render_distance_map(const TriangleMesh& mesh,
                                const RigidTransform& pose,
                                const CameraIntrinsics& cam,
                                const RenderOptions& options) {
  return depth_to_distance(render_depth_map(mesh, pose, cam, options), cam);
}

DepthMap render_scene_depth(std::span<const PosedMesh> objects,
                            const CameraIntrinsics& cam,
                            const RenderOptions& options) {
  check_inputs(cam, options);
  ZBuffer zb(cam.width, cam.height);
  for (const PosedMesh& obj : objects) {
    raster_mesh(*obj.mesh, obj.pose, cam, options, zb);
  }
  return to_depth(zb);
}

DistanceMap depth_to_distance(const DepthMap& depth, const CameraIntrinsics& cam) {
  cam.validate();
  if (!depth.same_shape(cam.width, cam.height)) {
    throw InputError("depth map is " + std::to_string(depth.width) + "x" +
                     std::to_string(depth.height) + " but the camera expects " +
                     std::to_string(cam.width) + "x" + std::to_string(cam.height));
  }
  DistanceMap out(depth.width, depth.height);
  for (int v = 0; v < depth.height; ++v) {
    for (int u = 0; u < depth.width; ++u) {
      const double d = depth.at(u, v);
      if (d == 0.0) continue;
      out.at(u, v) = d * pixel_ray(u, v, cam).norm();
    }
  }
  return out;
}

PixelList project_points(std::span<const Vec3> pts, const CameraIntrinsics& cam) {
  PixelList out;
  out.reserve(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Vec3& x = pts[i];
    if (!(x.z() > 0.0)) {
      throw InputError("cannot project point " + std::to_string(i) +
                       ": Z = " + std::to_string(x.z()) + " is not positive");
    }
    out.emplace_back(cam.fx * x.x() / x.z() + cam.cx, cam.fy * x.y() / x.z() + cam.cy);
  }
  return out;
}

}  // namespace bopeval

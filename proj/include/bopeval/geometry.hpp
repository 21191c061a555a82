#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace bopeval {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

// Point lists are plain vectors of Eigen 3-vectors. Vector3d is not a
// vectorizable fixed-size type, so no aligned allocator is needed.
using PointList = std::vector<Vec3>;
using PixelList = std::vector<Vec2>;

inline constexpr double kRotationTolerance = 1e-6;

// True when `m` is orthonormal with determinant +1 within `tol`.
bool is_rotation(const Mat3& m, double tol = kRotationTolerance);

// Nearest rotation in the Frobenius sense (SVD projection, reflection-safe).
Mat3 nearest_rotation(const Mat3& m);

// Rotation by `angle` radians about a unit `axis`.
Mat3 axis_angle(const Vec3& axis, double angle);

// Angle of the rotation, in [0, pi].
double rotation_angle(const Mat3& r);

// A rigid motion x -> R x + t. Translation in millimeters.
class RigidTransform {
 public:
  RigidTransform();  // identity

  // Throws InputError unless `rotation` passes is_rotation(rotation, tol).
  RigidTransform(const Mat3& rotation, const Vec3& translation,
                 double tol = kRotationTolerance);

  static RigidTransform identity() { return {}; }

  // Rotation by `angle` about the line through `point` with direction `axis`.
  static RigidTransform about_axis(const Vec3& axis, const Vec3& point,
                                   double angle);

  // From a 4x4 homogeneous matrix; last row must be (0,0,0,1).
  static RigidTransform from_matrix(const Mat4& m,
                                    double tol = kRotationTolerance);

  const Mat3& rotation() const { return rotation_; }
  const Vec3& translation() const { return translation_; }

  Vec3 apply(const Vec3& x) const { return rotation_ * x + translation_; }
  RigidTransform inverse() const;
  Mat4 matrix() const;

 private:
  struct Unchecked {};
  RigidTransform(const Mat3& rotation, const Vec3& translation, Unchecked)
      : rotation_(rotation), translation_(translation) {}

  friend RigidTransform compose(const RigidTransform& a,
                                const RigidTransform& b);

  Mat3 rotation_;
  Vec3 translation_;
};

// (a o b)(x) = a(b(x)).
RigidTransform compose(const RigidTransform& a, const RigidTransform& b);

PointList transform_points(const RigidTransform& p, std::span<const Vec3> pts);

struct CameraIntrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 0;
  int height = 0;

  // Throws InputError for non-positive focal lengths or image size.
  void validate() const;
};

using Triangle = std::array<std::uint32_t, 3>;

// Immutable object model: vertices (mm), triangles, and the exact diameter.
class TriangleMesh {
 public:
  TriangleMesh() = default;

  // Validates triangle indices and computes the diameter.
  TriangleMesh(PointList vertices, std::vector<Triangle> triangles);

  const PointList& vertices() const { return vertices_; }
  const std::vector<Triangle>& triangles() const { return triangles_; }
  double diameter() const { return diameter_; }
  bool empty() const { return vertices_.empty(); }

 private:
  PointList vertices_;
  std::vector<Triangle> triangles_;
  double diameter_ = 0.0;
};

// Largest pairwise distance. Exact for every input size: brute force below
// kExactDiameterLimit points, a pruned cell-pair search above it.
inline constexpr std::size_t kExactDiameterLimit = 20000;
double compute_diameter(std::span<const Vec3> pts);

Vec3 centroid(std::span<const Vec3> pts);

}  // namespace bopeval

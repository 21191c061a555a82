#include "bopeval/geometry.hpp"

#include "bopeval/error.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>

namespace bopeval {

bool is_rotation(const Mat3& m, double tol) {
  if (!m.allFinite()) return false;
  const Mat3 gram = m.transpose() * m;
  if ((gram - Mat3::Identity()).cwiseAbs().maxCoeff() > tol) return false;
  return std::abs(m.determinant() - 1.0) <= tol;
}

Mat3 nearest_rotation(const Mat3& m) {
  Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 u = svd.matrixU();
  const Mat3& v = svd.matrixV();
  if ((u * v.transpose()).determinant() < 0.0) u.col(2) *= -1.0;
  return u * v.transpose();
}

Mat3 axis_angle(const Vec3& axis, double angle) {
  return Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix();
}

double rotation_angle(const Mat3& r) {
  const double c = std::clamp((r.trace() - 1.0) / 2.0, -1.0, 1.0);
  return std::acos(c);
}

RigidTransform::RigidTransform()
    : rotation_(Mat3::Identity()), translation_(Vec3::Zero()) {}

RigidTransform::RigidTransform(const Mat3& rotation, const Vec3& translation,
                               double tol)
    : rotation_(rotation), translation_(translation) {
  if (!is_rotation(rotation, tol)) {
    throw InputError("rotation matrix is not orthonormal with det +1");
  }
  if (!translation.allFinite()) {
    throw InputError("translation has non-finite components");
  }
}

RigidTransform RigidTransform::about_axis(const Vec3& axis, const Vec3& point,
                                          double angle) {
  const Mat3 r = axis_angle(axis, angle);
  return {r, point - r * point, Unchecked{}};
}

RigidTransform RigidTransform::from_matrix(const Mat4& m, double tol) {
  const Eigen::RowVector4d last = m.row(3);
  if ((last - Eigen::RowVector4d(0, 0, 0, 1)).cwiseAbs().maxCoeff() > tol) {
    throw InputError("homogeneous transform must end with row (0, 0, 0, 1)");
  }
  return {m.topLeftCorner<3, 3>(), m.topRightCorner<3, 1>(), tol};
}

RigidTransform RigidTransform::inverse() const {
  const Mat3 rt = rotation_.transpose();
  return {rt, -(rt * translation_), Unchecked{}};
}

Mat4 RigidTransform::matrix() const {
  Mat4 m = Mat4::Identity();
  m.topLeftCorner<3, 3>() = rotation_;
  m.topRightCorner<3, 1>() = translation_;
  return m;
}

RigidTransform compose(const RigidTransform& a, const RigidTransform& b) {
  return {a.rotation_ * b.rotation_, a.rotation_ * b.translation_ + a.translation_,
          RigidTransform::Unchecked{}};
}

PointList transform_points(const RigidTransform& p, std::span<const Vec3> pts) {
  PointList out;
  out.reserve(pts.size());
  for (const Vec3& x : pts) out.push_back(p.apply(x));
  return out;
}

void CameraIntrinsics::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0)) {
    throw InputError("camera focal lengths must be positive");
  }
  if (width <= 0 || height <= 0) {
    throw InputError("camera image size must be positive");
  }
  if (!std::isfinite(cx) || !std::isfinite(cy)) {
    throw InputError("camera principal point must be finite");
  }
}

TriangleMesh::TriangleMesh(PointList vertices, std::vector<Triangle> triangles)
    : vertices_(std::move(vertices)), triangles_(std::move(triangles)) {
  const auto n = vertices_.size();
  for (std::size_t i = 0; i < triangles_.size(); ++i) {
    for (auto idx : triangles_[i]) {
      if (idx >= n) {
        throw InputError("triangle " + std::to_string(i) +
                         " references vertex " + std::to_string(idx) +
                         " but the mesh has " + std::to_string(n));
      }
    }
  }
  for (const Vec3& v : vertices_) {
    if (!v.allFinite()) throw InputError("mesh has a non-finite vertex");
  }
  diameter_ = compute_diameter(vertices_);
}

Vec3 centroid(std::span<const Vec3> pts) {
  Vec3 c = Vec3::Zero();
  if (pts.empty()) return c;
  for (const Vec3& p : pts) c += p;
  return c / static_cast<double>(pts.size());
}

namespace {

double brute_force_diameter(std::span<const Vec3> pts) {
  double best = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      best = std::max(best, (pts[i] - pts[j]).squaredNorm());
    }
  }
  return std::sqrt(best);
}

struct Cell {
  Eigen::AlignedBox3d box;
  std::vector<std::uint32_t> members;
};

// Upper bound on the squared distance between any two points of two boxes.
double max_squared_distance(const Eigen::AlignedBox3d& a,
                            const Eigen::AlignedBox3d& b) {
  double s = 0.0;
  for (int k = 0; k < 3; ++k) {
    const double d = std::max(std::abs(a.max()[k] - b.min()[k]),
                              std::abs(b.max()[k] - a.min()[k]));
    s += d * d;
  }
  return s;
}

// Buckets points into a coarse grid, then only compares point pairs from
// cell pairs whose box-to-box upper bound beats the current best.
double pruned_diameter(std::span<const Vec3> pts) {
  constexpr int kGrid = 12;
  Eigen::AlignedBox3d bounds;
  for (const Vec3& p : pts) bounds.extend(p);
  const Vec3 extent = bounds.sizes().cwiseMax(1e-12);

  std::vector<Cell> grid(kGrid * kGrid * kGrid);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    int idx = 0;
    for (int k = 0; k < 3; ++k) {
      int c = static_cast<int>((pts[i][k] - bounds.min()[k]) / extent[k] * kGrid);
      idx = idx * kGrid + std::clamp(c, 0, kGrid - 1);
    }
    grid[idx].box.extend(pts[i]);
    grid[idx].members.push_back(static_cast<std::uint32_t>(i));
  }
  std::erase_if(grid, [](const Cell& c) { return c.members.empty(); });

  // Seed the lower bound with a double farthest-point sweep.
  auto farthest_from = [&](const Vec3& q) {
    std::size_t arg = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const double d = (pts[i] - q).squaredNorm();
      if (d > best) {
        best = d;
        arg = i;
      }
    }
    return arg;
  };
  const std::size_t a = farthest_from(pts[0]);
  const std::size_t b = farthest_from(pts[a]);
  double best = (pts[a] - pts[b]).squaredNorm();

  struct Pair {
    double bound;
    std::uint32_t i, j;
  };
  std::vector<Pair> pairs;
  for (std::uint32_t i = 0; i < grid.size(); ++i) {
    for (std::uint32_t j = i; j < grid.size(); ++j) {
      const double ub = max_squared_distance(grid[i].box, grid[j].box);
      if (ub > best) pairs.push_back({ub, i, j});
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const Pair& x, const Pair& y) {
    if (x.bound != y.bound) return x.bound > y.bound;
    return std::tie(x.i, x.j) < std::tie(y.i, y.j);
  });

  for (const Pair& pr : pairs) {
    if (pr.bound <= best) break;
    for (auto u : grid[pr.i].members) {
      for (auto v : grid[pr.j].members) {
        best = std::max(best, (pts[u] - pts[v]).squaredNorm());
      }
    }
  }
  return std::sqrt(best);
}

}  // namespace

double compute_diameter(std::span<const Vec3> pts) {
  if (pts.size() < 2) return 0.0;
  if (pts.size() < kExactDiameterLimit) return brute_force_diameter(pts);
  return pruned_diameter(pts);
}

}  // namespace bopeval

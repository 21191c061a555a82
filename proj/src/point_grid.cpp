#include "bopeval/point_grid.hpp"

#include "bopeval/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bopeval {
namespace {

constexpr double kMaxCellsPerAxis = 256.0;

double auto_cell_size(std::span<const Vec3> points) {
  Eigen::AlignedBox3d box;
  for (const Vec3& p : points) box.extend(p);
  const double diag = points.empty() ? 0.0 : box.diagonal().norm();
  const double n = std::max<double>(1.0, static_cast<double>(points.size()));
  return std::max(diag / std::cbrt(n), 1e-6);
}

}  // namespace

PointGrid::PointGrid(std::span<const Vec3> points)
    : PointGrid(points, auto_cell_size(points)) {}

PointGrid::PointGrid(std::span<const Vec3> points, double cell_size)
    : points_(points.begin(), points.end()), cell_(cell_size) {
  if (!(cell_ > 0.0) || !std::isfinite(cell_)) {
    throw InputError("point grid cell size must be positive");
  }
  Eigen::AlignedBox3d box;
  for (const Vec3& p : points_) box.extend(p);
  if (!points_.empty()) {
    origin_ = box.min();
    // Very small cells only cost memory; queries stay exact for any size.
    cell_ = std::max(cell_, box.sizes().maxCoeff() / kMaxCellsPerAxis);
    const Vec3 n = (box.sizes() / cell_).array().floor() + 1.0;
    dims_ = {static_cast<std::int64_t>(n.x()), static_cast<std::int64_t>(n.y()),
             static_cast<std::int64_t>(n.z())};
  }
  const std::size_t cells = static_cast<std::size_t>(dims_.x * dims_.y * dims_.z);
  std::vector<std::size_t> owner(points_.size());
  starts_.assign(cells + 1, 0);
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const Key k = key_of(points_[i]);
    owner[i] = cell_index(std::clamp<std::int64_t>(k.x, 0, dims_.x - 1),
                          std::clamp<std::int64_t>(k.y, 0, dims_.y - 1),
                          std::clamp<std::int64_t>(k.z, 0, dims_.z - 1));
    ++starts_[owner[i] + 1];
  }
  for (std::size_t c = 0; c < cells; ++c) starts_[c + 1] += starts_[c];
  members_.resize(points_.size());
  std::vector<std::uint32_t> fill(starts_.begin(), starts_.end() - 1);
  for (std::size_t i = 0; i < points_.size(); ++i) {
    members_[fill[owner[i]]++] = static_cast<std::uint32_t>(i);
  }
}

PointGrid::Key PointGrid::key_of(const Vec3& p) const {
  const Vec3 r = (p - origin_) / cell_;
  return {static_cast<std::int64_t>(std::floor(r.x())),
          static_cast<std::int64_t>(std::floor(r.y())),
          static_cast<std::int64_t>(std::floor(r.z()))};
}

std::size_t PointGrid::cell_index(std::int64_t x, std::int64_t y, std::int64_t z) const {
  return static_cast<std::size_t>((z * dims_.y + y) * dims_.x + x);
}

std::span<const std::uint32_t> PointGrid::cell(std::int64_t x, std::int64_t y,
                                               std::int64_t z) const {
  const std::size_t c = cell_index(x, y, z);
  return {members_.data() + starts_[c], members_.data() + starts_[c + 1]};
}

bool PointGrid::has_point_within(const Vec3& q, double radius) const {
  if (points_.empty() || !(radius > 0.0)) return false;
  const double r2 = radius * radius;
  auto hit = [&](std::int64_t x, std::int64_t y, std::int64_t z) {
    for (auto idx : cell(x, y, z)) {
      if ((points_[idx] - q).squaredNorm() < r2) return true;
    }
    return false;
  };
  const Vec3 r(radius, radius, radius);
  const Key a = key_of(q - r);
  const Key b = key_of(q + r);
  const Key lo{std::max<std::int64_t>(a.x, 0), std::max<std::int64_t>(a.y, 0),
               std::max<std::int64_t>(a.z, 0)};
  const Key hi{std::min(b.x, dims_.x - 1), std::min(b.y, dims_.y - 1),
               std::min(b.z, dims_.z - 1)};
  // The cell holding q is the likeliest to contain a neighbour.
  const Key c = key_of(q);
  const bool inside = c.x >= lo.x && c.x <= hi.x && c.y >= lo.y && c.y <= hi.y &&
                      c.z >= lo.z && c.z <= hi.z;
  if (inside && hit(c.x, c.y, c.z)) return true;
  for (std::int64_t z = lo.z; z <= hi.z; ++z) {
    for (std::int64_t y = lo.y; y <= hi.y; ++y) {
      for (std::int64_t x = lo.x; x <= hi.x; ++x) {
        if (inside && x == c.x && y == c.y && z == c.z) continue;
        if (hit(x, y, z)) return true;
      }
    }
  }
  return false;
}

PointGrid::Neighbor PointGrid::nearest(const Vec3& q) const {
  if (points_.empty()) throw InvariantError("nearest_distance on an empty grid");
  const Key c = key_of(q);
  auto gap = [](std::int64_t v, std::int64_t hi) {
    return std::max<std::int64_t>({-v, v - hi, 0});
  };
  const std::int64_t k_min = std::max(
      {gap(c.x, dims_.x - 1), gap(c.y, dims_.y - 1), gap(c.z, dims_.z - 1)});
  const std::int64_t k_max =
      std::max({std::abs(c.x), std::abs(c.x - dims_.x + 1), std::abs(c.y),
                std::abs(c.y - dims_.y + 1), std::abs(c.z), std::abs(c.z - dims_.z + 1)});

  double best2 = std::numeric_limits<double>::infinity();
  std::uint32_t best_idx = 0;
  auto visit = [&](std::int64_t x, std::int64_t y, std::int64_t z) {
    if (x < 0 || x >= dims_.x || y < 0 || y >= dims_.y || z < 0 || z >= dims_.z) return;
    for (auto idx : cell(x, y, z)) {
      const double d2 = (points_[idx] - q).squaredNorm();
      if (d2 < best2 || (d2 == best2 && idx < best_idx)) {
        best2 = d2;
        best_idx = idx;
      }
    }
  };

  for (std::int64_t k = k_min; k <= k_max; ++k) {
    // Ring k clipped to the grid.
    const std::int64_t x0 = std::max<std::int64_t>(c.x - k, 0);
    const std::int64_t x1 = std::min(c.x + k, dims_.x - 1);
    const std::int64_t y0 = std::max<std::int64_t>(c.y - k, 0);
    const std::int64_t y1 = std::min(c.y + k, dims_.y - 1);
    const std::int64_t z0 = std::max<std::int64_t>(c.z - k, 0);
    const std::int64_t z1 = std::min(c.z + k, dims_.z - 1);
    for (std::int64_t x = x0; x <= x1; ++x) {
      for (std::int64_t y = y0; y <= y1; ++y) {
        if (std::abs(x - c.x) == k || std::abs(y - c.y) == k) {
          for (std::int64_t z = z0; z <= z1; ++z) visit(x, y, z);
        } else {
          if (c.z - k >= z0) visit(x, y, c.z - k);
          if (k != 0 && c.z + k <= z1) visit(x, y, c.z + k);
        }
      }
    }
    // Cells beyond ring k are at least k whole cells away from q.
    const double reach = static_cast<double>(k) * cell_;
    if (best2 <= reach * reach) break;
  }
  return {best_idx, std::sqrt(best2)};
}

double directed_hausdorff(std::span<const Vec3> from, const PointGrid& to) {
  double worst = 0.0;
  for (const Vec3& p : from) worst = std::max(worst, to.nearest_distance(p));
  return worst;
}

bool directed_hausdorff_below(std::span<const Vec3> from, const PointGrid& to,
                              double eps) {
  for (const Vec3& p : from) {
    if (!to.has_point_within(p, eps)) return false;
  }
  return true;
}

}  // namespace bopeval

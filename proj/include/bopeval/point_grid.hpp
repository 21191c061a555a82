#pragma once

#include "bopeval/geometry.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace bopeval {

// Uniform grid over a fixed point set. All queries are exact.
class PointGrid {
 public:
  PointGrid(std::span<const Vec3> points, double cell_size);

  // Picks a cell size from the point density.
  explicit PointGrid(std::span<const Vec3> points);

  double cell_size() const { return cell_; }
  std::size_t size() const { return points_.size(); }

  // True iff some stored point lies at distance strictly below `radius`.
  bool has_point_within(const Vec3& q, double radius) const;

  struct Neighbor {
    std::uint32_t index;
    double distance;
  };

  // Nearest stored point (lowest index among exact ties). Requires a
  // non-empty grid.
  Neighbor nearest(const Vec3& q) const;
  double nearest_distance(const Vec3& q) const { return nearest(q).distance; }
  const PointList& points() const { return points_; }

 private:
  struct Key {
    std::int64_t x, y, z;
  };

  Key key_of(const Vec3& p) const;
  std::size_t cell_index(std::int64_t x, std::int64_t y, std::int64_t z) const;
  // Members of one cell (clamped keys only).
  std::span<const std::uint32_t> cell(std::int64_t x, std::int64_t y, std::int64_t z) const;

  PointList points_;
  double cell_;
  Vec3 origin_ = Vec3::Zero();
  Key dims_{1, 1, 1};
  std::vector<std::uint32_t> starts_;   // CSR offsets, one per cell plus one
  std::vector<std::uint32_t> members_;  // point indices grouped by cell
};

// max over x in `from` of the distance to the nearest point of `to`.
double directed_hausdorff(std::span<const Vec3> from, const PointGrid& to);

// True iff directed_hausdorff(from, to) < eps. Stops at the first point that
// has no neighbour closer than eps.
bool directed_hausdorff_below(std::span<const Vec3> from, const PointGrid& to,
                              double eps);

}  // namespace bopeval

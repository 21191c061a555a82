#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace oracle {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Vec2 project(const Vec3& x, const CameraIntrinsics& cam) {
  return {cam.fx * x.x() / x.z() + cam.cx, cam.fy * x.y() / x.z() + cam.cy};
}

}  // namespace

DistanceMap raycast_distance(const TriangleMesh& mesh, const RigidTransform& pose,
                             const CameraIntrinsics& cam, double near) {
  PointList v;
  for (const Vec3& x : mesh.vertices()) v.push_back(pose.rotation() * x + pose.translation());
  DistanceMap out(cam.width, cam.height);
  for (int row = 0; row < cam.height; ++row) {
    for (int col = 0; col < cam.width; ++col) {
      const Vec3 dir((col - cam.cx) / cam.fx, (row - cam.cy) / cam.fy, 1.0);
      double best = kInf;
      for (const auto& t : mesh.triangles()) {
        const Vec3& a = v[t[0]];
        const Vec3 e1 = v[t[1]] - a;
        const Vec3 e2 = v[t[2]] - a;
        const Vec3 p = dir.cross(e2);
        const double det = e1.dot(p);
        if (det == 0.0) continue;
        const Vec3 s = -a;
        const double bu = s.dot(p) / det;
        if (bu < 0.0 || bu > 1.0) continue;
        const Vec3 q = s.cross(e1);
        const double bv = dir.dot(q) / det;
        if (bv < 0.0 || bu + bv > 1.0) continue;
        const double z = e2.dot(q) / det;  // ray parameter; dir has Z = 1
        if (z >= near && z < best) best = z;
      }
      if (best < kInf) out.at(col, row) = best * dir.norm();
    }
  }
  return out;
}

VisibilityMask visibility(const DistanceMap& rendered, const DistanceMap& measured,
                          double delta) {
  VisibilityMask m(rendered.width, rendered.height);
  for (int row = 0; row < rendered.height; ++row) {
    for (int col = 0; col < rendered.width; ++col) {
      const double r = rendered.at(col, row);
      const double s = measured.at(col, row);
      const bool vis = r > 0.0 && (s == 0.0 || r <= s + delta);
      m.bits[std::size_t(row) * m.width + col] = vis ? 1 : 0;
    }
  }
  return m;
}

VisibilityMask est_visibility(const DistanceMap& rendered_est, const DistanceMap& measured,
                              const VisibilityMask& gt_mask, double delta) {
  VisibilityMask m = visibility(rendered_est, measured, delta);
  for (std::size_t i = 0; i < m.bits.size(); ++i) {
    if (gt_mask.bits[i] && rendered_est.values[i] > 0.0) m.bits[i] = 1;
  }
  return m;
}

double visible_fraction(const VisibilityMask& mask, const DistanceMap& rendered) {
  std::size_t vis = 0, all = 0;
  for (std::size_t i = 0; i < mask.bits.size(); ++i) {
    if (rendered.values[i] > 0.0) ++all;
    if (mask.bits[i]) ++vis;
  }
  return all == 0 ? 0.0 : double(vis) / double(all);
}

std::vector<double> vsd(const DistanceMap& est, const DistanceMap& gt,
                        const VisibilityMask& est_mask, const VisibilityMask& gt_mask,
                        const std::vector<double>& taus) {
  std::vector<double> out;
  for (double tau : taus) {
    std::size_t uni = 0, cost = 0;
    for (int row = 0; row < est.height; ++row) {
      for (int col = 0; col < est.width; ++col) {
        const bool e = est_mask.at(col, row);
        const bool g = gt_mask.at(col, row);
        if (!e && !g) continue;
        ++uni;
        const bool ok = e && g && std::abs(est.at(col, row) - gt.at(col, row)) < tau;
        if (!ok) ++cost;
      }
    }
    out.push_back(double(cost) / double(uni));
  }
  return out;
}

double mssd(const RigidTransform& est, const RigidTransform& gt,
            const std::vector<RigidTransform>& syms, const PointList& verts) {
  double best = kInf;
  for (const RigidTransform& s : syms) {
    double worst = 0.0;
    for (const Vec3& x : verts) {
      const Vec3 a = est.rotation() * x + est.translation();
      const Vec3 sx = s.rotation() * x + s.translation();
      const Vec3 b = gt.rotation() * sx + gt.translation();
      worst = std::max(worst, (a - b).norm());
    }
    best = std::min(best, worst);
  }
  return best;
}

double mspd(const RigidTransform& est, const RigidTransform& gt,
            const std::vector<RigidTransform>& syms, const PointList& verts,
            const CameraIntrinsics& cam) {
  double best = kInf;
  for (const RigidTransform& s : syms) {
    double worst = 0.0;
    for (const Vec3& x : verts) {
      const Vec3 a = est.rotation() * x + est.translation();
      const Vec3 sx = s.rotation() * x + s.translation();
      const Vec3 b = gt.rotation() * sx + gt.translation();
      worst = std::max(worst, (project(a, cam) - project(b, cam)).norm());
    }
    best = std::min(best, worst);
  }
  return best;
}

double directed_hausdorff(const PointList& from, const PointList& to) {
  double worst = 0.0;
  for (const Vec3& x : from) {
    double best = kInf;
    for (const Vec3& y : to) best = std::min(best, (x - y).norm());
    worst = std::max(worst, best);
  }
  return worst;
}

double hausdorff(const PointList& a, const PointList& b) {
  return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a));
}

double add(const RigidTransform& est, const RigidTransform& gt, const PointList& verts) {
  double sum = 0.0;
  for (const Vec3& x : verts) {
    sum += ((est.rotation() * x + est.translation()) - (gt.rotation() * x + gt.translation())).norm();
  }
  return sum / double(verts.size());
}

double adi(const RigidTransform& est, const RigidTransform& gt, const PointList& verts) {
  double sum = 0.0;
  for (const Vec3& x : verts) {
    const Vec3 a = est.rotation() * x + est.translation();
    double best = kInf;
    for (const Vec3& y : verts) {
      best = std::min(best, (a - (gt.rotation() * y + gt.translation())).norm());
    }
    sum += best;
  }
  return sum / double(verts.size());
}

std::vector<bool> greedy(const std::vector<double>& scores,
                         const std::vector<std::vector<double>>& errors, std::size_t num_gt,
                         double theta) {
  std::vector<bool> taken(num_gt, false);
  std::vector<bool> used(scores.size(), false);
  for (std::size_t round = 0; round < scores.size(); ++round) {
    // Highest remaining score; the earliest index wins ties.
    std::size_t e = scores.size();
    for (std::size_t i = 0; i < scores.size(); ++i) {
      if (!used[i] && (e == scores.size() || scores[i] > scores[e])) e = i;
    }
    used[e] = true;
    std::size_t pick = num_gt;
    for (std::size_t g = 0; g < num_gt; ++g) {
      if (taken[g] || !(errors[e][g] < theta)) continue;
      if (pick == num_gt || errors[e][g] < errors[e][pick]) pick = g;
    }
    if (pick < num_gt) taken[pick] = true;
  }
  return taken;
}

std::size_t max_matching(const std::vector<std::vector<double>>& errors, double theta) {
  const std::size_t num_est = errors.size();
  const std::size_t num_gt = num_est ? errors.front().size() : 0;
  std::size_t best = 0;
  std::vector<bool> taken(num_gt, false);
  auto rec = [&](auto&& self, std::size_t e, std::size_t count) -> void {
    if (e == num_est) {
      best = std::max(best, count);
      return;
    }
    self(self, e + 1, count);
    for (std::size_t g = 0; g < num_gt; ++g) {
      if (!taken[g] && errors[e][g] < theta) {
        taken[g] = true;
        self(self, e + 1, count + 1);
        taken[g] = false;
      }
    }
  };
  rec(rec, 0, 0);
  return best;
}

std::vector<RigidTransform> cube_rotations() {
  std::vector<RigidTransform> out;
  std::array<int, 3> perm{0, 1, 2};
  do {
    for (int signs = 0; signs < 8; ++signs) {
      Mat3 m = Mat3::Zero();
      for (int r = 0; r < 3; ++r) m(r, perm[r]) = (signs >> r & 1) ? -1.0 : 1.0;
      if (m.determinant() > 0.0) out.emplace_back(m, Vec3::Zero());
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

std::vector<RigidTransform> square_prism_rotations() {
  std::vector<RigidTransform> out;
  for (const RigidTransform& r : cube_rotations()) {
    if (std::abs(std::abs(r.rotation()(2, 2)) - 1.0) < 1e-12) out.push_back(r);
  }
  return out;
}

RigidTransform random_rotation(std::mt19937& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
  q.normalize();
  return RigidTransform(q.toRotationMatrix(), Vec3::Zero());
}

RigidTransform random_pose(std::mt19937& rng, double lateral, double z_min, double z_max) {
  std::uniform_real_distribution<double> l(-lateral, lateral);
  std::uniform_real_distribution<double> z(z_min, z_max);
  return RigidTransform(random_rotation(rng).rotation(), Vec3(l(rng), l(rng), z(rng)));
}

VsdCase random_vsd_case(std::mt19937& rng) {
  std::uniform_int_distribution<int> size(8, 32);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> base(500.0, 1500.0);
  const int w = size(rng);
  const int h = size(rng);
  VsdCase c{DistanceMap(w, h), DistanceMap(w, h), VisibilityMask(w, h), VisibilityMask(w, h), {}};
  const double coverage = unit(rng);
  for (std::size_t i = 0; i < c.est.values.size(); ++i) {
    const double d = base(rng);
    // Quantized offsets make exact ties with tau likely.
    const double offset = std::round(unit(rng) * 40.0) - 20.0;
    if (unit(rng) < coverage) c.gt.values[i] = d;
    if (unit(rng) < coverage) c.est.values[i] = d + offset;
    if (c.gt.values[i] > 0 && unit(rng) < 0.8) c.gt_mask.bits[i] = 1;
    if (c.est.values[i] > 0 && unit(rng) < 0.8) c.est_mask.bits[i] = 1;
  }
  c.gt.values[0] = 1000.0;
  c.gt_mask.bits[0] = 1;
  double tau = 0.0;
  for (int k = 0; k < 20; ++k) {
    tau += 0.5 + std::round(unit(rng) * 4.0) * 0.5;
    c.taus.push_back(tau);
  }
  return c;
}

}  // namespace oracle

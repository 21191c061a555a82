#include "bopeval/selfcheck.hpp"

#include "bopeval/pose_error.hpp"
#include "bopeval/shapes.hpp"
#include "bopeval/symmetry.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>

namespace bopeval {

namespace {

using Clock = std::chrono::steady_clock;

SelfCheckResult timed(const std::string& name, const std::function<std::string()>& body) {
  SelfCheckResult r;
  r.name = name;
  const auto start = Clock::now();
  try {
    r.detail = body();
    r.passed = r.detail.empty();
  } catch (const std::exception& e) {
    r.detail = std::string("exception: ") + e.what();
  }
  r.elapsed = Clock::now() - start;
  if (r.passed) r.detail = "ok";
  return r;
}

RigidTransform random_pose(std::mt19937& rng, double z_min, double z_max) {
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::acos(-1.0));
  std::uniform_real_distribution<double> lateral(-50.0, 50.0);
  std::uniform_real_distribution<double> depth(z_min, z_max);
  const Vec3 axis = Vec3(n(rng), n(rng), n(rng)).normalized();
  return RigidTransform(axis_angle(axis, angle(rng)), Vec3(lateral(rng), lateral(rng), depth(rng)));
}

// The 24 rotations mapping the cube [-1,1]^3 onto itself.
std::vector<RigidTransform> cube_group() {
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

std::string check_vsd(unsigned seed, bool corrupt) {
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> side(8, 32);
  std::uniform_real_distribution<double> dist(500.0, 520.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int inst = 0; inst < 200; ++inst) {
    const int w = side(rng), h = side(rng);
    DistanceMap est(w, h), gt(w, h);
    VisibilityMask em(w, h), gm(w, h);
    const bool forced = corrupt && inst == 0;
    for (std::size_t i = 0; i < est.values.size(); ++i) {
      est.values[i] = dist(rng);
      gt.values[i] = forced ? est.values[i] : dist(rng);
      em.bits[i] = forced || unit(rng) < 0.6;
      gm.bits[i] = forced || unit(rng) < 0.6;
    }
    gm.bits[0] = 1;
    std::vector<double> taus(20);
    for (int k = 0; k < 20; ++k) taus[k] = 1.0 * (k + 1);

    const VsdErrorVector got = vsd(est, gt, em, gm, taus);
    DistanceMap ref_est = est;
    if (forced) {
      for (double& v : ref_est.values) v += 1e6;
    }
    for (int k = 0; k < 20; ++k) {
      std::size_t uni = 0, bad = 0;
      for (int v = 0; v < h; ++v) {
        for (int u = 0; u < w; ++u) {
          const bool e = em.at(u, v), g = gm.at(u, v);
          if (!e && !g) continue;
          ++uni;
          if (!(e && g && std::abs(ref_est.at(u, v) - gt.at(u, v)) < taus[k])) ++bad;
        }
      }
      const double expected = double(bad) / double(uni);
      if (got[k].error != expected) {
        return "instance " + std::to_string(inst) + " tau " + std::to_string(taus[k]) +
               ": got " + std::to_string(got[k].error) + ", expected " + std::to_string(expected);
      }
    }
  }
  return {};
}

std::string check_mssd_mspd(unsigned seed, bool corrupt) {
  std::mt19937 rng(seed);
  const auto group = cube_group();
  SymmetrySet syms;
  for (std::size_t i = 1; i < group.size(); ++i) syms.add_unchecked(group[i], SymmetryProvenance::Annotated);
  std::uniform_real_distribution<double> coord(-50.0, 50.0);
  PointList verts;
  for (int i = 0; i < 200; ++i) verts.emplace_back(coord(rng), coord(rng), coord(rng));
  const CameraIntrinsics cam{600.0, 600.0, 320.0, 240.0, 640, 480};

  for (int inst = 0; inst < 100; ++inst) {
    const RigidTransform est = random_pose(rng, 400.0, 900.0);
    const RigidTransform gt = random_pose(rng, 400.0, 900.0);
    const RigidTransform ref_est =
        corrupt && inst == 0 ? RigidTransform(est.rotation(), est.translation() + Vec3(5, 0, 0)) : est;

    double best_s = std::numeric_limits<double>::infinity();
    double best_p = std::numeric_limits<double>::infinity();
    for (const RigidTransform& s : group) {
      double worst_s = 0.0, worst_p = 0.0;
      for (const Vec3& x : verts) {
        const Vec3 a = ref_est.apply(x);
        const Vec3 b = gt.apply(s.apply(x));
        worst_s = std::max(worst_s, (a - b).norm());
        const Vec2 pa(cam.fx * a.x() / a.z() + cam.cx, cam.fy * a.y() / a.z() + cam.cy);
        const Vec2 pb(cam.fx * b.x() / b.z() + cam.cx, cam.fy * b.y() / b.z() + cam.cy);
        worst_p = std::max(worst_p, (pa - pb).norm());
      }
      best_s = std::min(best_s, worst_s);
      best_p = std::min(best_p, worst_p);
    }
    const double got_s = mssd(est, gt, syms, verts);
    const double got_p = mspd(est, gt, syms, verts, cam);
    if (std::abs(got_s - best_s) > 1e-9) {
      return "instance " + std::to_string(inst) + ": mssd " + std::to_string(got_s) +
             " vs " + std::to_string(best_s);
    }
    if (std::abs(got_p - best_p) > 1e-6) {
      return "instance " + std::to_string(inst) + ": mspd " + std::to_string(got_p) +
             " vs " + std::to_string(best_p);
    }
  }
  return {};
}

std::string check_hausdorff(unsigned seed, bool corrupt) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> coord(-100.0, 100.0);
  for (int inst = 0; inst < 20; ++inst) {
    PointList a, b;
    for (int i = 0; i < 200; ++i) a.emplace_back(coord(rng), coord(rng), coord(rng));
    for (int i = 0; i < 200; ++i) b.emplace_back(coord(rng), coord(rng), coord(rng));
    const double got = hausdorff(a, b);
    if (corrupt && inst == 0) b.emplace_back(1000.0, 0.0, 0.0);
    auto directed = [](const PointList& from, const PointList& to) {
      double worst = 0.0;
      for (const Vec3& x : from) {
        double best = std::numeric_limits<double>::infinity();
        for (const Vec3& y : to) best = std::min(best, (x - y).norm());
        worst = std::max(worst, best);
      }
      return worst;
    };
    const double expected = std::max(directed(a, b), directed(b, a));
    if (got != expected) {
      return "instance " + std::to_string(inst) + ": " + std::to_string(got) + " vs " +
             std::to_string(expected);
    }
  }
  return {};
}

std::string check_cube_symmetries(bool corrupt) {
  const TriangleMesh mesh = corrupt ? make_box(100, 100, 130, 2) : make_box(100, 100, 100, 2);
  const SymmetrySet set = find_discrete_symmetries(mesh);
  if (set.size() != 24) return "found " + std::to_string(set.size()) + " rotations, expected 24";
  const double eps = symmetry_epsilon(mesh);
  for (std::size_t i = 0; i < set.size(); ++i) {
    const PointList moved = transform_points(set[i], mesh.vertices());
    double worst = 0.0;
    for (const auto* pair : {&moved, &mesh.vertices()}) {
      const PointList& from = *pair;
      const PointList& to = pair == &moved ? mesh.vertices() : moved;
      for (const Vec3& x : from) {
        double best = std::numeric_limits<double>::infinity();
        for (const Vec3& y : to) best = std::min(best, (x - y).norm());
        worst = std::max(worst, best);
      }
    }
    if (!(worst < eps)) return "rotation " + std::to_string(i) + " fails re-verification";
  }
  return {};
}

}  // namespace

std::vector<SelfCheckResult> run_self_checks(const SelfCheckOptions& options) {
  const bool c = options.corrupt;
  const unsigned s = options.seed;
  return {
      timed("vsd vs pixel loop", [&] { return check_vsd(s, c); }),
      timed("mssd/mspd vs triple loop", [&] { return check_mssd_mspd(s + 1, c); }),
      timed("hausdorff vs double loop", [&] { return check_hausdorff(s + 2, c); }),
      timed("cube symmetry group", [&] { return check_cube_symmetries(c); }),
  };
}

}  // namespace bopeval

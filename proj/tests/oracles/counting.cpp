#include "counting.hpp"

#include "bopeval/bop_io.hpp"
#include "bopeval/depth_png.hpp"
#include "bopeval/ply.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

namespace oracle {

using namespace bopeval;
namespace fs = std::filesystem;

namespace {

std::vector<double> grid(double first, double step) {
  std::vector<double> out;
  for (int i = 0; i < 10; ++i) out.push_back(first + step * i);
  return out;
}

DistanceMap measured_distance(const fs::path& png, double scale, const CameraIntrinsics& cam) {
  const Gray16Image raw = read_png16(png);
  DistanceMap out(cam.width, cam.height);
  for (int v = 0; v < cam.height; ++v) {
    for (int u = 0; u < cam.width; ++u) {
      const double z = raw.pixels[std::size_t(v) * cam.width + u] * scale;
      const double x = (u - cam.cx) / cam.fx, y = (v - cam.cy) / cam.fy;
      out.at(u, v) = z * std::sqrt(x * x + y * y + 1.0);
    }
  }
  return out;
}

double brute_diameter(const PointList& pts) {
  double d = 0.0;
  for (const Vec3& a : pts) {
    for (const Vec3& b : pts) d = std::max(d, (a - b).norm());
  }
  return d;
}

}  // namespace

Recalls minidataset_recalls(const fs::path& root, const fs::path& targets_path,
                            const std::vector<bopeval::PoseEstimate>& all) {
  const TargetCounts targets = read_targets(targets_path);
  const SceneGroundTruth scene =
      read_scene_gt(root / "test" / "000001", read_dataset_camera(root));
  std::map<int, TriangleMesh> meshes;
  std::map<int, std::vector<RigidTransform>> syms;
  std::map<int, double> diam;
  for (int obj : {1, 2}) {
    meshes[obj] = load_mesh(root / "models" / ("obj_00000" + std::to_string(obj) + ".ply"));
    diam[obj] = brute_diameter(meshes[obj].vertices());
  }
  syms[1] = oracle::cube_rotations();
  syms[2] = {RigidTransform()};

  const std::vector<double> taus = grid(0.05, 0.05), thetas = grid(0.05, 0.05);
  const std::vector<double> mssd_thetas = grid(0.05, 0.05), mspd_thetas = grid(5, 5);
  std::vector<std::size_t> vsd_correct(taus.size() * thetas.size(), 0);
  std::vector<std::size_t> mssd_correct(10, 0), mspd_correct(10, 0);
  std::size_t num_gt = 0;

  for (const auto& [key, n] : targets) {
    const SceneImage& img = scene.images.at(key.im_id);
    const CameraIntrinsics& cam = img.camera;
    char name[16];
    std::snprintf(name, sizeof name, "%06d.png", key.im_id);
    const DistanceMap measured =
        measured_distance(root / "test" / "000001" / "depth" / name, img.depth_scale, cam);
    const TriangleMesh& mesh = meshes.at(key.obj_id);

    std::vector<DistanceMap> gt_render;
    std::vector<VisibilityMask> gt_mask;
    std::vector<RigidTransform> gt_pose;
    for (const GroundTruthPose& g : img.gts) {
      if (g.obj_id != key.obj_id) continue;
      DistanceMap r = oracle::raycast_distance(mesh, g.pose, cam);
      VisibilityMask m = oracle::visibility(r, measured, 15.0);
      if (oracle::visible_fraction(m, r) < 0.1) continue;
      gt_render.push_back(std::move(r));
      gt_mask.push_back(std::move(m));
      gt_pose.push_back(g.pose);
    }
    num_gt += gt_pose.size();
    if (gt_pose.empty()) continue;

    std::vector<PoseEstimate> ests;
    for (const PoseEstimate& e : all) {
      if (e.scene_id == key.scene_id && e.im_id == key.im_id && e.obj_id == key.obj_id) {
        ests.push_back(e);
      }
    }
    std::stable_sort(ests.begin(), ests.end(),
                     [](const PoseEstimate& a, const PoseEstimate& b) { return a.score > b.score; });
    if (ests.size() > std::size_t(n)) ests.resize(n);

    std::vector<double> scores;
    std::vector<std::vector<std::vector<double>>> vsd_err(taus.size());
    std::vector<std::vector<double>> mssd_err, mspd_err;
    for (const PoseEstimate& e : ests) {
      scores.push_back(e.score);
      const DistanceMap r = oracle::raycast_distance(mesh, e.pose, cam);
      for (auto& t : vsd_err) t.emplace_back();
      mssd_err.emplace_back();
      mspd_err.emplace_back();
      for (std::size_t j = 0; j < gt_pose.size(); ++j) {
        const VisibilityMask em = oracle::est_visibility(r, measured, gt_mask[j], 15.0);
        std::vector<double> taus_mm;
        for (double t : taus) taus_mm.push_back(t * diam[key.obj_id]);
        const std::vector<double> v = oracle::vsd(r, gt_render[j], em, gt_mask[j], taus_mm);
        for (std::size_t t = 0; t < taus.size(); ++t) vsd_err[t].back().push_back(v[t]);
        const PointList& verts = mesh.vertices();
        mssd_err.back().push_back(oracle::mssd(e.pose, gt_pose[j], syms[key.obj_id], verts));
        mspd_err.back().push_back(oracle::mspd(e.pose, gt_pose[j], syms[key.obj_id], verts, cam));
      }
    }
    const auto count = [&](const std::vector<std::vector<double>>& err, double theta) {
      const auto ok = oracle::greedy(scores, err, gt_pose.size(), theta);
      return std::size_t(std::count(ok.begin(), ok.end(), true));
    };
    for (std::size_t t = 0; t < taus.size(); ++t) {
      for (std::size_t k = 0; k < thetas.size(); ++k) {
        vsd_correct[t * thetas.size() + k] += count(vsd_err[t], thetas[k]);
      }
    }
    for (std::size_t k = 0; k < 10; ++k) {
      mssd_correct[k] += count(mssd_err, mssd_thetas[k] * diam[key.obj_id]);
      mspd_correct[k] += count(mspd_err, mspd_thetas[k] * cam.width / 640.0);
    }
  }
  const auto mean = [&](const std::vector<std::size_t>& c) {
    double s = 0.0;
    for (std::size_t x : c) s += double(x) / double(num_gt);
    return s / double(c.size());
  };
  return {mean(vsd_correct), mean(mssd_correct), mean(mspd_correct)};
}

}  // namespace oracle

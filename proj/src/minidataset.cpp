#include "bopeval/minidataset.hpp"

#include "bopeval/depth_png.hpp"
#include "bopeval/ply.hpp"
#include "bopeval/raster.hpp"
#include "bopeval/shapes.hpp"
#include "bopeval/symmetry.hpp"

#include <numbers>

namespace bopeval {

namespace fs = std::filesystem;

namespace {

RigidTransform pose(const Vec3& axis, double angle, const Vec3& t) {
  return RigidTransform(axis_angle(axis.normalized(), angle), t);
}

RigidTransform translated(const RigidTransform& p, const Vec3& d) {
  return RigidTransform(p.rotation(), p.translation() + d);
}

PoseEstimate estimate(int im_id, int obj_id, double score, const RigidTransform& p,
                      std::optional<double> time) {
  PoseEstimate e;
  e.scene_id = MiniDataset::kScene;
  e.im_id = im_id;
  e.obj_id = obj_id;
  e.score = score;
  e.pose = p;
  e.time = time;
  return e;
}

void number_rows(std::vector<PoseEstimate>& rows) {
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i].row = i;
}

}  // namespace

MiniDataset build_minidataset() {
  MiniDataset d;
  d.camera = {572.4, 573.6, 320.0, 240.0, 640, 480};
  d.models.emplace(MiniDataset::kCube, make_box(100, 100, 100, 2));
  d.models.emplace(MiniDataset::kTetrahedron, make_scalene_tetrahedron(0.8));
  d.background = make_quad(4000);
  d.background_pose = RigidTransform(Mat3::Identity(), Vec3(0, 0, 1100));

  const int cube = MiniDataset::kCube;
  const int tet = MiniDataset::kTetrahedron;
  d.scene.scene_id = MiniDataset::kScene;
  auto add_image = [&](int im_id, std::vector<GroundTruthPose> gts) {
    SceneImage img;
    img.im_id = im_id;
    img.camera = d.camera;
    img.depth_scale = d.depth_scale;
    img.gts = std::move(gts);
    d.scene.images.emplace(im_id, img);
  };
  add_image(0, {{cube, pose({1, 1, 0}, 0.5, {-90, -20, 700})},
                {tet, pose({0, 1, 1}, 0.8, {100, 40, 650})}});
  add_image(1, {{cube, pose({0, 0, 1}, 0.3, {0, 0, 600})},
                {tet, pose({1, 0, 0}, 0.0, {0, 0, 800})}});
  add_image(2, {{cube, pose({1, 0, 0}, 0.4, {-120, 0, 750})},
                {cube, pose({0, 1, 0}, 1.0, {110, -30, 800})},
                {tet, pose({1, 0, 1}, 2.0, {0, 110, 700})}});
  add_image(3, {{cube, pose({0, 1, 1}, 0.2, {0, 0, 700})},
                {tet, pose({0, 0, 1}, 1.2, {-30, 0, 450})}});

  for (const auto& [im_id, img] : d.scene.images) {
    std::map<int, int> counts;
    for (const GroundTruthPose& g : img.gts) ++counts[g.obj_id];
    for (const auto& [obj, n] : counts) d.targets[{MiniDataset::kScene, im_id, obj}] = n;
  }

  const auto gt = [&](int im_id, std::size_t k) { return d.scene.images.at(im_id).gts[k].pose; };
  const auto diam = [&](int obj) { return d.models.at(obj).diameter(); };

  std::vector<PoseEstimate> perfect;
  std::vector<PoseEstimate> shifted;
  for (const auto& [im_id, img] : d.scene.images) {
    for (const GroundTruthPose& g : img.gts) {
      perfect.push_back(estimate(im_id, g.obj_id, 1.0, g.pose, 0.25));
      shifted.push_back(estimate(im_id, g.obj_id, 1.0,
                                 translated(g.pose, {2.0 * diam(g.obj_id), 0, 0}), 0.25));
    }
  }

  const double quarter_turn = std::numbers::pi / 2;
  std::vector<PoseEstimate> mixed{
      estimate(0, cube, 0.9, translated(gt(0, 0), {0.23 * diam(cube), 0, 0}), 0.2),
      estimate(0, tet, 0.8, gt(0, 1), 0.2),
      estimate(1, cube, 0.7, compose(gt(1, 0), pose({0, 0, 1}, quarter_turn, {0, 0, 0})), 0.3),
      estimate(1, tet, 0.6, gt(1, 1), 0.3),
      estimate(2, cube, 0.95, gt(2, 1), 0.3),
      estimate(2, cube, 0.6, translated(gt(2, 0), {0, 0, 0.08 * diam(cube)}), 0.35),
      estimate(2, cube, 0.99, pose({1, 2, 3}, 1.1, {60, 150, 900}), 0.3),
      estimate(2, tet, 0.5, compose(gt(2, 2), pose({1, 0, 0}, 10.0 * std::numbers::pi / 180, {0, 0, 0})), 0.3),
      estimate(3, tet, 0.4, translated(gt(3, 1), {5, 5, 5}), std::nullopt),
  };

  std::vector<PoseEstimate> perturbed{
      estimate(0, cube, 1.0, translated(gt(0, 0), {0.23 * diam(cube), 0, 0}), 0.1),
  };
  d.perturbed_targets[{MiniDataset::kScene, 0, cube}] = 1;

  number_rows(perfect);
  number_rows(shifted);
  number_rows(mixed);
  number_rows(perturbed);
  d.submissions.emplace("perfect", std::move(perfect));
  d.submissions.emplace("shifted", std::move(shifted));
  d.submissions.emplace("mixed", std::move(mixed));
  d.submissions.emplace("perturbed", std::move(perturbed));
  return d;
}

void write_minidataset(const MiniDataset& data, const fs::path& root) {
  fs::create_directories(root / "models");
  fs::create_directories(root / "submissions");

  ModelsInfo info;
  for (const auto& [obj_id, mesh] : data.models) {
    save_mesh(model_path(root, obj_id), mesh, PlyFormat::Ascii);
    const SymmetryAnalysis a = analyze_symmetries(mesh);
    ObjectInfo o;
    o.diameter = mesh.diameter();
    o.has_symmetries = true;
    for (std::size_t i = 1; i < a.discrete.size(); ++i) {
      o.discrete.push_back(a.discrete[i]);
      o.provenance.push_back(a.discrete.provenance()[i]);
    }
    o.continuous = a.continuous;
    o.review_notice = "geometric symmetries; texture review pending";
    info.emplace(obj_id, std::move(o));
  }
  write_models_info(models_info_path(root), info);
  write_dataset_camera(root, {data.camera.width, data.camera.height});

  const fs::path dir = scene_dir(root, "test", data.scene.scene_id);
  write_scene_gt(dir, data.scene);
  fs::create_directories(dir / "depth");
  for (const auto& [im_id, img] : data.scene.images) {
    std::vector<PosedMesh> objects{{&data.background, data.background_pose}};
    for (const GroundTruthPose& g : img.gts) objects.push_back({&data.models.at(g.obj_id), g.pose});
    const DepthMap depth = render_scene_depth(objects, img.camera);
    write_depth_png(depth_path(dir, im_id), depth, img.depth_scale);
  }

  write_targets(root / "test_targets.json", data.targets);
  write_targets(root / "targets_perturbed.json", data.perturbed_targets);
  for (const auto& [name, rows] : data.submissions) {
    save_submission(root / "submissions" / (name + ".csv"), rows);
  }
}

}  // namespace bopeval

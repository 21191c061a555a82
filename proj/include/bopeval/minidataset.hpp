#pragma once

#include "bopeval/bop_io.hpp"
#include "bopeval/geometry.hpp"
#include "bopeval/scoring.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace bopeval {

// Synthetic BOP-layout dataset: a 100 mm cube (object 1) and a scalene
// tetrahedron (object 2) in front of a background plane, seen by a 640x480
// camera over four images of scene 1. In image 1 the tetrahedron is hidden
// behind the cube.
struct MiniDataset {
  static constexpr int kCube = 1;
  static constexpr int kTetrahedron = 2;
  static constexpr int kScene = 1;

  CameraIntrinsics camera;
  double depth_scale = 0.1;
  std::map<int, TriangleMesh> models;
  RigidTransform background_pose;
  TriangleMesh background;
  SceneGroundTruth scene;
  TargetCounts targets;

  // Named submissions:
  //   perfect   - every GT pose, score 1
  //   shifted   - every GT pose translated by 2 d along X
  //   mixed     - hand-built mix of exact, symmetric, shifted, missing and
  //               false estimates
  //   perturbed - the image 0 cube translated by 0.23 d along X; scored
  //               against `perturbed_targets`
  std::map<std::string, std::vector<PoseEstimate>> submissions;
  TargetCounts perturbed_targets;
};

MiniDataset build_minidataset();

// Writes models, models_info.json (searched symmetries), camera.json,
// scene files, rendered depth PNGs, targets and submissions/<name>.csv.
void write_minidataset(const MiniDataset& data, const std::filesystem::path& root);

}  // namespace bopeval

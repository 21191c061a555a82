#include "bopeval/depth_png.hpp"
#include "bopeval/error.hpp"
#include "bopeval/raster.hpp"
#include "bopeval/shapes.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

using namespace bopeval;

namespace {

const CameraIntrinsics kSmallCam{500, 500, 32, 32, 64, 64};

RigidTransform at_z(double z) { return RigidTransform(Mat3::Identity(), Vec3(0, 0, z)); }

}  // namespace

TEST_CASE("square on the optical axis") {
  const TriangleMesh square = make_quad(100);  // 50 px wide at Z = 1000
  const DistanceMap d = render_distance_map(square, at_z(1000), kSmallCam);
  CHECK(d.at(32, 32) == doctest::Approx(1000.0).epsilon(1e-12));
  const double corner = 1000.0 * Vec3(16.0 / 500, 16.0 / 500, 1.0).norm();
  CHECK(d.at(48, 48) == doctest::Approx(corner).epsilon(1e-12));
  CHECK(corner == doctest::Approx(1001.02).epsilon(1e-5));
  CHECK(d.at(0, 0) == 0.0);
  CHECK(d.at(63, 63) == 0.0);
}

TEST_CASE("nearer surface wins") {
  const TriangleMesh square = make_quad(100);
  const std::vector<PosedMesh> scene{{&square, at_z(1200)}, {&square, at_z(800)}};
  const DepthMap depth = render_scene_depth(scene, kSmallCam);
  CHECK(depth.at(32, 32) == doctest::Approx(800.0).epsilon(1e-12));
  const DistanceMap dist = depth_to_distance(depth, kSmallCam);
  const DistanceMap ray = oracle::raycast_distance(square, at_z(800), kSmallCam);
  for (int v = 0; v < 64; ++v) {
    for (int u = 0; u < 64; ++u) {
      if (ray.at(u, v) > 0 && dist.at(u, v) > 0) {
        CHECK(dist.at(u, v) == doctest::Approx(ray.at(u, v)).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("depth to distance") {
  const CameraIntrinsics cam{600, 600, 320, 240, 640, 480};
  DepthMap depth(640, 480);
  depth.at(320, 240) = 500;
  depth.at(620, 240) = 1000;
  const DistanceMap d = depth_to_distance(depth, cam);
  CHECK(d.at(320, 240) == 500.0);
  CHECK(d.at(620, 240) == doctest::Approx(1000 * std::sqrt(1.25)).epsilon(1e-12));
  CHECK(std::abs(d.at(620, 240) - 1118.03) < 0.01);
  CHECK(d.at(0, 0) == 0.0);
  CHECK_THROWS_AS(depth_to_distance(DepthMap(10, 10), cam), InputError);
}

TEST_CASE("project points") {
  const CameraIntrinsics cam{500, 500, 320, 240, 640, 480};
  const PointList pts{{0, 0, 700}, {100, 0, 1000}, {30, -20, 400}, {60, -40, 800}};
  const PixelList px = project_points(pts, cam);
  CHECK(px[0] == Vec2(320, 240));
  CHECK(px[1].x() == doctest::Approx(370.0));
  CHECK((px[2] - px[3]).norm() < 1e-12);
  try {
    const PointList behind{{0, 0, 10}, {0, 0, -1}};
    project_points(behind, cam);
    FAIL("expected an error");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("point 1") != std::string::npos);
  }
}

TEST_CASE("degenerate camera is rejected") {
  const CameraIntrinsics bad{0, 500, 32, 32, 64, 64};
  CHECK_THROWS_AS(render_distance_map(make_quad(10), at_z(100), bad), InputError);
}

TEST_CASE("random triangles match the ray-cast oracle") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> c(-80.0, 80.0);
  std::uniform_real_distribution<double> z(300.0, 900.0);
  std::size_t covered = 0, mismatched = 0;
  for (int i = 0; i < 100; ++i) {
    const TriangleMesh tri({{c(rng), c(rng), z(rng) - 600}, {c(rng), c(rng), z(rng) - 600},
                            {c(rng), c(rng), z(rng) - 600}},
                           {{0, 1, 2}});
    const RigidTransform pose = at_z(600);
    const DistanceMap got = render_distance_map(tri, pose, kSmallCam);
    const DistanceMap ref = oracle::raycast_distance(tri, pose, kSmallCam);
    for (std::size_t p = 0; p < got.values.size(); ++p) {
      const bool a = got.values[p] > 0, b = ref.values[p] > 0;
      if (a && b) {
        ++covered;
        CHECK(std::abs(got.values[p] - ref.values[p]) < 0.1);
      } else if (a != b) {
        ++mismatched;
      }
    }
  }
  // Coverage may only differ for pixel centers lying on an edge.
  CHECK(covered > 10000);
  CHECK(mismatched == 0);
}

TEST_CASE("closed meshes match the ray-cast oracle") {
  const CameraIntrinsics cam{300, 300, 40, 30, 80, 60};
  std::mt19937 rng(12);
  const TriangleMesh box = make_box(80, 60, 40, 2);
  for (int i = 0; i < 10; ++i) {
    const RigidTransform pose = oracle::random_pose(rng, 30, 400, 600);
    const DistanceMap got = render_distance_map(box, pose, cam);
    const DistanceMap ref = oracle::raycast_distance(box, pose, cam);
    std::size_t differ = 0;
    for (std::size_t p = 0; p < got.values.size(); ++p) {
      if ((got.values[p] > 0) != (ref.values[p] > 0)) {
        ++differ;
      } else if (got.values[p] > 0) {
        CHECK(std::abs(got.values[p] - ref.values[p]) < 1e-6);
      }
    }
    CHECK(differ == 0);
  }
}

TEST_CASE("depth render and distance render agree") {
  std::mt19937 rng(13);
  const TriangleMesh box = make_box(50, 50, 50, 1);
  const CameraIntrinsics cam{400, 400, 50, 40, 100, 80};
  for (int i = 0; i < 10; ++i) {
    const RigidTransform pose = oracle::random_pose(rng, 20, 300, 500);
    const DepthMap depth = render_depth_map(box, pose, cam);
    const DistanceMap dist = render_distance_map(box, pose, cam);
    const DistanceMap converted = depth_to_distance(depth, cam);
    for (std::size_t p = 0; p < dist.values.size(); ++p) {
      CHECK(std::abs(converted.values[p] - dist.values[p]) <= 1e-6 * dist.values[p]);
    }
    CHECK(render_distance_map(box, pose, cam) == dist);
  }
}

TEST_CASE("near-plane clipping") {
  // A large square straddling the camera plane: only the part with Z >= 10 mm
  // is drawn, and nothing behind the camera.
  const TriangleMesh square({{-500, -500, -100}, {500, -500, -100}, {500, 500, 300}, {-500, 500, 300}},
                            {{0, 1, 2}, {0, 2, 3}});
  const DistanceMap d = render_distance_map(square, RigidTransform(), kSmallCam);
  for (double v : d.values) CHECK(v >= 0.0);
  const DistanceMap ref = oracle::raycast_distance(square, RigidTransform(), kSmallCam);
  for (std::size_t p = 0; p < d.values.size(); ++p) {
    if (d.values[p] > 0 && ref.values[p] > 0) {
      CHECK(d.values[p] == doctest::Approx(ref.values[p]).epsilon(1e-9));
    }
  }
  const TriangleMesh behind = make_quad(100);
  const DistanceMap none = render_distance_map(behind, at_z(-500), kSmallCam);
  for (double v : none.values) CHECK(v == 0.0);
}

TEST_CASE("depth png round trip and scale") {
  const auto dir = std::filesystem::temp_directory_path() / "bopeval_raster_test";
  std::filesystem::create_directories(dir);
  DepthMap depth(4, 3);
  depth.at(1, 1) = 500.0;
  depth.at(3, 2) = 1234.5;
  write_depth_png(dir / "d.png", depth, 0.1);
  const Gray16Image raw = read_png16(dir / "d.png");
  CHECK(raw.pixels[1 * 4 + 1] == 5000);
  const DepthMap back = read_depth_png(dir / "d.png", 0.1);
  CHECK(back.at(1, 1) == doctest::Approx(500.0).epsilon(1e-12));
  CHECK(back.at(3, 2) == doctest::Approx(1234.5).epsilon(1e-12));
  CHECK(back.at(0, 0) == 0.0);

  DepthMap too_far(1, 1);
  too_far.at(0, 0) = 7000.0;
  CHECK_THROWS_AS(write_depth_png(dir / "far.png", too_far, 0.1), InputError);
  CHECK_THROWS_AS(read_depth_png(dir / "missing.png", 1.0), InputError);
  std::filesystem::remove_all(dir);
}

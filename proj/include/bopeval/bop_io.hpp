#pragma once

#include "bopeval/error.hpp"
#include "bopeval/geometry.hpp"
#include "bopeval/raster.hpp"
#include "bopeval/scoring.hpp"
#include "bopeval/symmetry.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace bopeval {

// ---------------------------------------------------------------------------
// Submission CSV
//
//   scene_id,im_id,obj_id,score,R,t,time
//   1,3,5,0.88,1 0 0 0 1 0 0 0 1,10 20 500,0.45
//
// R is row-major, t is in mm, time is seconds per image (-1 = not reported).

enum class SubmissionErrorKind {
  Io,
  Header,
  FieldCount,
  NonNumeric,
  RotationArity,
  TranslationArity,
  NonFinite,
  NotOrthonormal,
  InvalidId,
  InvalidTime,
};

std::string to_string(SubmissionErrorKind kind);

class SubmissionError : public InputError {
 public:
  SubmissionError(SubmissionErrorKind kind, std::size_t line, const std::string& message);

  SubmissionErrorKind kind() const { return kind_; }
  std::size_t line() const { return line_; }  // 1-based; 0 when not line-specific

 private:
  SubmissionErrorKind kind_;
  std::size_t line_;
};

// Rotations must be orthonormal within this bound; accepted rotations are
// projected onto SO(3).
inline constexpr double kSubmissionRotationTolerance = 1e-3;

std::vector<PoseEstimate> read_submission(std::istream& in,
                                          const std::string& source = "submission");
std::vector<PoseEstimate> read_submission(const std::filesystem::path& path);

// Fixed notation, shortest round-trip digits.
void write_submission(std::ostream& out, std::span<const PoseEstimate> estimates);
void save_submission(const std::filesystem::path& path,
                     std::span<const PoseEstimate> estimates);

// ---------------------------------------------------------------------------
// Dataset layout
//
//   <root>/camera.json                  {"width", "height", ...}
//   <root>/models/models_info.json
//   <root>/models/obj_<obj_id:06>.ply
//   <root>/<split>/<scene_id:06>/scene_gt.json
//   <root>/<split>/<scene_id:06>/scene_camera.json
//   <root>/<split>/<scene_id:06>/depth/<im_id:06>.png
//   <root>/test_targets.json

struct GroundTruthPose {
  int obj_id = 0;
  RigidTransform pose;
};

struct SceneImage {
  int im_id = 0;
  CameraIntrinsics camera;
  double depth_scale = 1.0;
  std::vector<GroundTruthPose> gts;
};

struct SceneGroundTruth {
  int scene_id = 0;
  std::map<int, SceneImage> images;
};

std::filesystem::path scene_dir(const std::filesystem::path& root, const std::string& split,
                                int scene_id);
std::filesystem::path depth_path(const std::filesystem::path& scene_dir, int im_id);
std::filesystem::path model_path(const std::filesystem::path& root, int obj_id);
std::filesystem::path models_info_path(const std::filesystem::path& root);

struct ImageSize {
  int width = 0;
  int height = 0;
};

// Image size from <root>/camera.json.
ImageSize read_dataset_camera(const std::filesystem::path& root);
void write_dataset_camera(const std::filesystem::path& root, ImageSize size);

// Reads scene_gt.json and scene_camera.json. Per-image "width"/"height" in
// scene_camera.json override `default_size`. Throws InputError naming the
// file when one is missing or malformed, and when the two files list
// different image ids.
SceneGroundTruth read_scene_gt(const std::filesystem::path& dir, ImageSize default_size);
void write_scene_gt(const std::filesystem::path& dir, const SceneGroundTruth& scene);

// Depth in mm, or nullopt (with a warning) when the PNG is absent.
std::optional<DepthMap> load_scene_depth(const std::filesystem::path& dir,
                                         const SceneImage& image);

// ---------------------------------------------------------------------------
// Targets: JSON list of {"scene_id", "im_id", "obj_id", "inst_count"}.

TargetCounts read_targets(const std::filesystem::path& path);
void write_targets(const std::filesystem::path& path, const TargetCounts& targets);

// ---------------------------------------------------------------------------
// models_info.json, keyed by object id:
//   "diameter": mm
//   "symmetries_discrete": [16 floats row-major, ...]   (identity implied)
//   "symmetries_continuous": [{"axis": [x,y,z], "offset": [x,y,z]}, ...]
//   "symmetries_provenance": ["annotated" | "searched" | ..., ...]
//   "symmetries_review": free text shown to the annotator

struct ObjectInfo {
  std::optional<double> diameter;
  bool has_symmetries = false;  // any symmetries_* key present
  std::vector<RigidTransform> discrete;  // without the identity
  std::vector<SymmetryProvenance> provenance;
  std::vector<ContinuousSymmetry> continuous;
  std::string review_notice;
};

using ModelsInfo = std::map<int, ObjectInfo>;

ModelsInfo read_models_info(const std::filesystem::path& path);
void write_models_info(const std::filesystem::path& path, const ModelsInfo& info);

// Texture filter: {"<obj_id>": [retained indices into the expanded set]}.
std::map<int, std::vector<std::size_t>> read_texture_filter(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Reports

std::string report_to_json(const EvaluationReport& report);
EvaluationReport report_from_json(const std::string& text);
EvaluationReport read_report(const std::filesystem::path& path);

// Percent with one decimal, e.g. 0.698 -> "69.8".
std::string format_percent(double value);

// Human-readable table: AR per dataset, the average, and time.
std::string report_table(const EvaluationReport& report);

// Writes <dir>/report.json and <dir>/report.txt. Throws InputError for an
// empty report or an unwritable directory.
void write_report(const EvaluationReport& report, const std::filesystem::path& dir);

// ---------------------------------------------------------------------------
// Evaluation configuration (JSON). Every key is optional:
//   {"method", "split", "datasets": {"<name>": "<root>"}, "targets",
//    "vsd_delta", "visib_threshold", "est_mask_extension", "symmetries",
//    "texture_filter",
//    "workers", "thresholds": {"vsd_taus", "vsd_thetas", "mssd", "mspd"}}

struct DatasetLocation {
  std::string name;
  std::filesystem::path root;
};

struct EvalConfig {
  std::string method;
  std::string split = "test";
  std::vector<DatasetLocation> datasets;
  std::optional<std::filesystem::path> targets;      // default <root>/test_targets.json
  std::optional<std::filesystem::path> symmetries;   // default <root>/models/models_info.json
  std::optional<std::filesystem::path> texture_filter;
  double vsd_delta = 15.0;       // mm
  double visib_threshold = 0.1;  // minimum visible fraction of a GT instance
  bool est_mask_extension = true;
  ThresholdGrid thresholds = ThresholdGrid::standard();
  std::size_t workers = 0;       // 0 = all cores

  // Throws InputError for out-of-range values.
  void validate() const;
};

EvalConfig read_config(const std::filesystem::path& path);

// Reads a whole file; throws InputError naming it on failure.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace bopeval

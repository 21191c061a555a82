#pragma once

#include "bopeval/geometry.hpp"

#include <compare>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace bopeval {

struct ImageKey {
  int scene_id = 0;
  int im_id = 0;
  auto operator<=>(const ImageKey&) const = default;
};

struct TargetKey {
  int scene_id = 0;
  int im_id = 0;
  int obj_id = 0;
  auto operator<=>(const TargetKey&) const = default;
  ImageKey image() const { return {scene_id, im_id}; }
};

// Number of instances to localize per (scene, image, object).
using TargetCounts = std::map<TargetKey, int>;

struct GroundTruthInstance {
  int scene_id = 0;
  int im_id = 0;
  int obj_id = 0;
  int gt_index = 0;  // position in the image's annotation list
  RigidTransform pose;
  double visible_fraction = 1.0;
};

struct PoseEstimate {
  int scene_id = 0;
  int im_id = 0;
  int obj_id = 0;
  double score = 0.0;
  RigidTransform pose;
  std::optional<double> time;  // seconds; absent when the method reports none
  std::size_t row = 0;         // 0-based position in the submission file

  TargetKey key() const { return {scene_id, im_id, obj_id}; }
};

// Keeps, for every targeted key, the n highest-scoring estimates (ties broken
// by file order). Estimates for keys absent from `targets` are dropped. The
// result preserves file order.
std::vector<PoseEstimate> select_top_n(std::span<const PoseEstimate> estimates,
                                       const TargetCounts& targets);

// Errors between the estimates and ground truths of one (image, object):
// row-major, one row per estimate. +inf marks an invalid estimate (never
// correct); NaN marks a missing entry, which is an error.
struct ErrorMatrix {
  std::size_t num_est = 0;
  std::size_t num_gt = 0;
  std::vector<double> values;

  ErrorMatrix() = default;
  ErrorMatrix(std::size_t est, std::size_t gt);
  double& at(std::size_t e, std::size_t g) { return values[e * num_gt + g]; }
  double at(std::size_t e, std::size_t g) const { return values[e * num_gt + g]; }
};

// Greedy matching at one threshold: estimates in descending score (ties by
// position), each taking the unmatched ground truth with the smallest error
// (ties by position) provided that error < threshold. Returns per-GT
// correctness. Throws InputError on a NaN entry or a size mismatch.
std::vector<bool> match_and_judge(std::span<const double> scores,
                                  const ErrorMatrix& errors, double threshold);

enum class ErrorFunction { Vsd, Mssd, Mspd };
std::string to_string(ErrorFunction f);

// Correctness thresholds. VSD taus and MSSD thetas are fractions of the
// object diameter; MSPD thetas are in pixels at a 640 px wide image and are
// scaled by r = width / 640.
struct ThresholdGrid {
  std::vector<double> vsd_taus;
  std::vector<double> vsd_thetas;
  std::vector<double> mssd_thetas;
  std::vector<double> mspd_thetas;

  // 0.05 .. 0.5 step 0.05 for VSD tau/theta and MSSD; 5 .. 50 step 5 for MSPD.
  static ThresholdGrid standard();
  void validate() const;
};

std::vector<double> vsd_taus_mm(const ThresholdGrid& grid, double diameter);
std::vector<double> mssd_thresholds_mm(const ThresholdGrid& grid, double diameter);
std::vector<double> mspd_thresholds_px(const ThresholdGrid& grid, int image_width);

struct RecallCell {
  std::optional<double> tau;  // fraction of the diameter, VSD only
  double theta = 0.0;         // as stored in the ThresholdGrid
  double recall = 0.0;

  bool operator==(const RecallCell&) const = default;
};

struct RecallGrid {
  ErrorFunction function = ErrorFunction::Mssd;
  std::size_t expected_cells = 0;
  std::vector<RecallCell> cells;

  bool operator==(const RecallGrid&) const = default;
};

// Mean of all recall values. Throws InputError when the grid is incomplete
// or holds a value outside [0, 1].
double average_recall(const RecallGrid& grid);

// All errors needed to judge one (image, object) group.
struct GroupErrors {
  TargetKey key;
  std::vector<double> scores;  // per estimate, file order
  std::size_t num_gt = 0;
  double diameter = 0.0;       // mm
  int image_width = 640;       // px
  std::vector<ErrorMatrix> vsd;  // one per VSD tau, same order as the grid
  ErrorMatrix mssd;
  ErrorMatrix mspd;
};

struct DatasetRecalls {
  RecallGrid vsd;
  RecallGrid mssd;
  RecallGrid mspd;
  std::size_t num_gt = 0;
};

// Recall for every threshold setting over all groups of one dataset. The
// denominator is the total number of ground-truth instances in the groups.
DatasetRecalls score_dataset(std::span<const GroupErrors> groups,
                             const ThresholdGrid& grid);

struct DatasetResult {
  std::string name;
  RecallGrid vsd;
  RecallGrid mssd;
  RecallGrid mspd;
  double ar_vsd = 0.0;
  double ar_mssd = 0.0;
  double ar_mspd = 0.0;
  double ar_d = 0.0;
  std::size_t num_gt = 0;
  std::size_t num_estimates = 0;
  std::size_t timed_images = 0;
  std::optional<double> mean_time;  // seconds per image
  std::vector<std::string> diagnostics;

  bool operator==(const DatasetResult&) const = default;
};

// Fills the AR fields of `result` from its recall grids.
void compute_average_recalls(DatasetResult& result);

struct EvaluationReport {
  int schema = 1;
  std::string method;
  std::vector<DatasetResult> datasets;
  double ar_core = 0.0;
  std::optional<double> mean_time;

  bool operator==(const EvaluationReport&) const = default;
};

// AR_D = (AR_VSD + AR_MSSD + AR_MSPD) / 3 per dataset, AR_Core = unweighted
// mean of AR_D, and the per-image time averaged over every timed image.
// Throws InputError for an empty list.
EvaluationReport aggregate_report(std::vector<DatasetResult> per_dataset,
                                  std::string method = {});

// Per-image processing time: the maximum over rows of the image, with a
// warning when rows disagree. Images without a reported time are omitted.
std::map<ImageKey, double> image_times(std::span<const PoseEstimate> estimates);

}  // namespace bopeval

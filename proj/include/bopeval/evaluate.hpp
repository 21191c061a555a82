#pragma once

#include "bopeval/bop_io.hpp"
#include "bopeval/geometry.hpp"
#include "bopeval/scoring.hpp"
#include "bopeval/symmetry.hpp"

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bopeval {

struct ObjectModel {
  TriangleMesh mesh;
  double diameter = 0.0;  // mm, from models_info when given there
  SymmetrySet symmetries;
};

struct EvaluationOptions {
  std::string split = "test";
  double vsd_delta = 15.0;
  double visib_threshold = 0.1;
  // Count estimate pixels inside the GT mask as visible.
  bool est_mask_extension = true;
  ThresholdGrid thresholds = ThresholdGrid::standard();
  std::size_t workers = 0;
  SymmetrySearchOptions search;
  std::function<void(std::string_view)> progress;  // optional
};

EvaluationOptions options_from_config(const EvalConfig& config);

struct DatasetInput {
  std::string name;
  std::filesystem::path root;
  std::vector<PoseEstimate> estimates;
  std::optional<std::filesystem::path> targets;         // default <root>/test_targets.json
  std::optional<std::filesystem::path> models_info;     // default <root>/models/models_info.json
  std::optional<std::filesystem::path> texture_filter;  // none by default
};

// Loads the meshes of `obj_ids` and their symmetry sets. Annotated
// symmetries are used when models_info has them; otherwise they are searched.
// Texture filtering applies when the filter lists the object.
std::map<int, ObjectModel> load_object_models(const DatasetInput& input,
                                              const std::vector<int>& obj_ids,
                                              const EvaluationOptions& options);

// Full pipeline for one dataset: targets, top-n selection, GT visibility
// filtering, VSD/MSSD/MSPD error tables, matching and recall grids.
DatasetResult evaluate_dataset(const DatasetInput& input, const EvaluationOptions& options);

EvaluationReport evaluate(const std::vector<DatasetInput>& inputs,
                          const EvaluationOptions& options, const std::string& method = {});

}  // namespace bopeval

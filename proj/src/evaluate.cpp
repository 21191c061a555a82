#include "bopeval/evaluate.hpp"

#include "bopeval/error.hpp"
#include "bopeval/parallel.hpp"
#include "bopeval/ply.hpp"
#include "bopeval/pose_error.hpp"
#include "bopeval/raster.hpp"
#include "bopeval/visibility.hpp"

#include <limits>
#include <set>

namespace bopeval {

namespace fs = std::filesystem;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void report(const EvaluationOptions& options, const std::string& message) {
  if (options.progress) options.progress(message);
}

void validate(const EvaluationOptions& options) {
  if (!(options.vsd_delta > 0.0) || !std::isfinite(options.vsd_delta)) {
    throw InputError("vsd delta must be positive");
  }
  if (!(options.visib_threshold > 0.0 && options.visib_threshold <= 1.0)) {
    throw InputError("visibility threshold must lie in (0, 1]");
  }
  options.thresholds.validate();
}

std::string describe(const PoseEstimate& e) {
  return "row " + std::to_string(e.row + 1) + " (scene " + std::to_string(e.scene_id) +
         ", image " + std::to_string(e.im_id) + ", object " + std::to_string(e.obj_id) + ")";
}

struct VisibleGt {
  DistanceMap render;
  VisibilityMask mask;
  RigidTransform pose;
};

struct ImageResult {
  std::vector<GroupErrors> groups;
  std::vector<std::string> diagnostics;
};

}  // namespace

EvaluationOptions options_from_config(const EvalConfig& config) {
  EvaluationOptions o;
  o.split = config.split;
  o.vsd_delta = config.vsd_delta;
  o.visib_threshold = config.visib_threshold;
  o.est_mask_extension = config.est_mask_extension;
  o.thresholds = config.thresholds;
  o.workers = config.workers;
  return o;
}

std::map<int, ObjectModel> load_object_models(const DatasetInput& input,
                                              const std::vector<int>& obj_ids,
                                              const EvaluationOptions& options) {
  const fs::path info_path = input.models_info.value_or(models_info_path(input.root));
  ModelsInfo info;
  if (input.models_info || fs::exists(info_path)) info = read_models_info(info_path);
  std::map<int, std::vector<std::size_t>> texture;
  if (input.texture_filter) texture = read_texture_filter(*input.texture_filter);

  SymmetrySearchOptions search = options.search;
  if (search.workers == 0) search.workers = options.workers;

  std::map<int, ObjectModel> out;
  for (int obj_id : obj_ids) {
    const std::string label = input.name + " object " + std::to_string(obj_id);
    ObjectModel model;
    model.mesh = load_mesh(model_path(input.root, obj_id));
    if (model.mesh.triangles().empty()) throw InputError(label + ": model has no triangles");
    const auto it = info.find(obj_id);
    const ObjectInfo* oi = it == info.end() ? nullptr : &it->second;
    model.diameter = oi && oi->diameter ? *oi->diameter : model.mesh.diameter();

    const bool annotated = oi && oi->has_symmetries;
    if (annotated) {
      model.symmetries = expand_symmetries(oi->discrete, oi->continuous, model.mesh,
                                           SymmetryProvenance::Annotated);
    } else {
      report(options, label + ": no symmetry annotation, searching");
      const SymmetryAnalysis a = analyze_symmetries(model.mesh, search);
      if (a.needs_review) warn(label + ": several continuous axes found; review the symmetries");
      model.symmetries = expand_symmetries(a.discrete.transforms(), a.continuous, model.mesh,
                                           SymmetryProvenance::Searched);
    }
    if (const auto t = texture.find(obj_id); t != texture.end()) {
      model.symmetries = filter_by_texture(model.symmetries, t->second, label);
    } else if (!annotated) {
      model.symmetries = filter_by_texture(model.symmetries, std::nullopt, label);
    }
    out.emplace(obj_id, std::move(model));
  }
  return out;
}

DatasetResult evaluate_dataset(const DatasetInput& input, const EvaluationOptions& options) {
  validate(options);
  const TargetCounts targets =
      read_targets(input.targets.value_or(input.root / "test_targets.json"));

  std::set<int> obj_set;
  std::set<int> scene_ids;
  std::map<ImageKey, std::vector<std::pair<int, int>>> per_image;
  for (const auto& [key, n] : targets) {
    obj_set.insert(key.obj_id);
    scene_ids.insert(key.scene_id);
    per_image[key.image()].emplace_back(key.obj_id, n);
  }
  const std::map<int, ObjectModel> models =
      load_object_models(input, {obj_set.begin(), obj_set.end()}, options);

  ImageSize default_size;
  if (fs::exists(input.root / "camera.json")) default_size = read_dataset_camera(input.root);
  std::map<int, SceneGroundTruth> scenes;
  for (int scene_id : scene_ids) {
    scenes.emplace(scene_id,
                   read_scene_gt(scene_dir(input.root, options.split, scene_id), default_size));
  }

  const std::vector<PoseEstimate> selected = select_top_n(input.estimates, targets);
  std::map<TargetKey, std::vector<const PoseEstimate*>> by_key;
  for (const PoseEstimate& e : selected) by_key[e.key()].push_back(&e);

  const std::vector<ImageKey> images = [&] {
    std::vector<ImageKey> v;
    for (const auto& [k, objs] : per_image) v.push_back(k);
    return v;
  }();
  report(options, input.name + ": evaluating " + std::to_string(selected.size()) +
                      " estimates on " + std::to_string(images.size()) + " images");

  std::vector<ImageResult> results(images.size());
  parallel_for(images.size(), options.workers, [&](std::size_t i) {
    const ImageKey& ik = images[i];
    const SceneGroundTruth& scene = scenes.at(ik.scene_id);
    const auto img_it = scene.images.find(ik.im_id);
    if (img_it == scene.images.end()) {
      throw InputError(input.name + ": scene " + std::to_string(ik.scene_id) +
                       " has no image " + std::to_string(ik.im_id));
    }
    const SceneImage& img = img_it->second;
    const CameraIntrinsics& cam = img.camera;
    const fs::path dir = scene_dir(input.root, options.split, ik.scene_id);
    const std::optional<DepthMap> depth = load_scene_depth(dir, img);
    const DistanceMap measured =
        depth ? depth_to_distance(*depth, cam) : DistanceMap(cam.width, cam.height);

    ImageResult& out = results[i];
    for (const auto& [obj_id, n] : per_image.at(ik)) {
      const ObjectModel& model = models.at(obj_id);
      const auto& verts = model.mesh.vertices();

      std::vector<VisibleGt> gts;
      for (const GroundTruthPose& g : img.gts) {
        if (g.obj_id != obj_id) continue;
        DistanceMap render = render_distance_map(model.mesh, g.pose, cam);
        VisibilityMask mask = gt_visibility_mask(render, measured, options.vsd_delta);
        if (visible_fraction(mask, render) >= options.visib_threshold) {
          gts.push_back({std::move(render), std::move(mask), g.pose});
        }
      }
      if (gts.empty()) continue;

      const TargetKey key{ik.scene_id, ik.im_id, obj_id};
      static const std::vector<const PoseEstimate*> kNone;
      const auto est_it = by_key.find(key);
      const auto& ests = est_it == by_key.end() ? kNone : est_it->second;

      GroupErrors g;
      g.key = key;
      g.num_gt = gts.size();
      g.diameter = model.diameter;
      g.image_width = cam.width;
      const std::vector<double> taus = vsd_taus_mm(options.thresholds, model.diameter);
      g.vsd.assign(taus.size(), ErrorMatrix(ests.size(), gts.size()));
      g.mssd = ErrorMatrix(ests.size(), gts.size());
      g.mspd = ErrorMatrix(ests.size(), gts.size());

      for (std::size_t e = 0; e < ests.size(); ++e) {
        const PoseEstimate& est = *ests[e];
        g.scores.push_back(est.score);
        const DistanceMap est_render = render_distance_map(model.mesh, est.pose, cam);
        bool vsd_noted = false;
        bool mspd_noted = false;
        for (std::size_t j = 0; j < gts.size(); ++j) {
          const VisibleGt& gt = gts[j];
          try {
            const VisibilityMask est_mask =
                options.est_mask_extension
                    ? est_visibility_mask_extended(est_render, measured, gt.mask, options.vsd_delta)
                    : visibility_mask(est_render, measured, options.vsd_delta);
            const VsdErrorVector v = vsd(est_render, gt.render, est_mask, gt.mask, taus);
            for (std::size_t t = 0; t < taus.size(); ++t) g.vsd[t].at(e, j) = v[t].error;
          } catch (const InputError& err) {
            for (std::size_t t = 0; t < taus.size(); ++t) g.vsd[t].at(e, j) = kInf;
            if (!vsd_noted) out.diagnostics.push_back(input.name + ": " + describe(est) + ": " + err.what());
            vsd_noted = true;
          }
          g.mssd.at(e, j) = mssd(est.pose, gt.pose, model.symmetries, verts);
          try {
            g.mspd.at(e, j) = mspd(est.pose, gt.pose, model.symmetries, verts, cam);
          } catch (const InputError& err) {
            g.mspd.at(e, j) = kInf;
            if (!mspd_noted) out.diagnostics.push_back(input.name + ": " + describe(est) + ": " + err.what());
            mspd_noted = true;
          }
        }
      }
      out.groups.push_back(std::move(g));
    }
  });

  std::vector<GroupErrors> groups;
  DatasetResult result;
  result.name = input.name;
  for (ImageResult& r : results) {
    for (GroupErrors& g : r.groups) groups.push_back(std::move(g));
    for (std::string& d : r.diagnostics) result.diagnostics.push_back(std::move(d));
  }
  const DatasetRecalls recalls = score_dataset(groups, options.thresholds);
  result.vsd = recalls.vsd;
  result.mssd = recalls.mssd;
  result.mspd = recalls.mspd;
  result.num_gt = recalls.num_gt;
  result.num_estimates = selected.size();
  compute_average_recalls(result);

  const auto times = image_times(selected);
  double time_sum = 0.0;
  for (const ImageKey& ik : images) {
    if (const auto t = times.find(ik); t != times.end()) {
      time_sum += t->second;
      ++result.timed_images;
    }
  }
  if (result.timed_images > 0) result.mean_time = time_sum / double(result.timed_images);

  report(options, input.name + ": AR_D = " + format_percent(result.ar_d));
  return result;
}

EvaluationReport evaluate(const std::vector<DatasetInput>& inputs,
                          const EvaluationOptions& options, const std::string& method) {
  if (inputs.empty()) throw InputError("no datasets to evaluate");
  std::vector<DatasetResult> results;
  for (const DatasetInput& input : inputs) results.push_back(evaluate_dataset(input, options));
  return aggregate_report(std::move(results), method);
}

}  // namespace bopeval

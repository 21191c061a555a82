#include "bopeval/scoring.hpp"

#include "bopeval/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace bopeval {

std::vector<PoseEstimate> select_top_n(std::span<const PoseEstimate> estimates,
                                       const TargetCounts& targets) {
  std::map<TargetKey, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    if (targets.contains(estimates[i].key())) groups[estimates[i].key()].push_back(i);
  }
  std::vector<bool> keep(estimates.size(), false);
  for (auto& [key, idx] : groups) {
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      return estimates[a].score > estimates[b].score;
    });
    const auto n = static_cast<std::size_t>(std::max(0, targets.at(key)));
    for (std::size_t k = 0; k < std::min(n, idx.size()); ++k) keep[idx[k]] = true;
  }
  std::vector<PoseEstimate> out;
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    if (keep[i]) out.push_back(estimates[i]);
  }
  return out;
}

ErrorMatrix::ErrorMatrix(std::size_t est, std::size_t gt)
    : num_est(est), num_gt(gt), values(est * gt, std::numeric_limits<double>::quiet_NaN()) {}

std::vector<bool> match_and_judge(std::span<const double> scores,
                                  const ErrorMatrix& errors, double threshold) {
  if (scores.size() != errors.num_est || errors.values.size() != errors.num_est * errors.num_gt) {
    throw InputError("match_and_judge: error table does not match the estimate count");
  }
  for (std::size_t i = 0; i < errors.values.size(); ++i) {
    if (std::isnan(errors.values[i])) {
      throw InputError("match_and_judge: error table is missing the pair (estimate " +
                       std::to_string(i / errors.num_gt) + ", ground truth " +
                       std::to_string(i % errors.num_gt) + ")");
    }
  }
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  std::vector<bool> correct(errors.num_gt, false);
  for (std::size_t e : order) {
    std::size_t best = errors.num_gt;
    double best_err = threshold;
    for (std::size_t g = 0; g < errors.num_gt; ++g) {
      if (correct[g]) continue;
      const double err = errors.at(e, g);
      if (err < best_err) {
        best_err = err;
        best = g;
      }
    }
    if (best < errors.num_gt) correct[best] = true;
  }
  return correct;
}

std::string to_string(ErrorFunction f) {
  switch (f) {
    case ErrorFunction::Vsd: return "vsd";
    case ErrorFunction::Mssd: return "mssd";
    case ErrorFunction::Mspd: return "mspd";
  }
  return "unknown";
}

namespace {

std::vector<double> steps(int first, int last, int step, double unit) {
  std::vector<double> out;
  for (int k = first; k <= last; k += step) out.push_back(k * unit);
  return out;
}

void check_list(const std::vector<double>& v, const char* what, bool fraction) {
  if (v.empty()) throw InputError(std::string("threshold grid '") + what + "' is empty");
  for (double x : v) {
    if (!(x > 0.0) || !std::isfinite(x) || (fraction && x > 1.0)) {
      throw InputError(std::string("threshold grid '") + what + "' has an invalid value");
    }
  }
}

}  // namespace

ThresholdGrid ThresholdGrid::standard() {
  ThresholdGrid g;
  g.vsd_taus = steps(5, 50, 5, 0.01);
  g.vsd_thetas = steps(5, 50, 5, 0.01);
  g.mssd_thetas = steps(5, 50, 5, 0.01);
  g.mspd_thetas = steps(5, 50, 5, 1.0);
  return g;
}

void ThresholdGrid::validate() const {
  check_list(vsd_taus, "vsd_taus", false);
  check_list(vsd_thetas, "vsd_thetas", true);
  check_list(mssd_thetas, "mssd_thetas", false);
  check_list(mspd_thetas, "mspd_thetas", false);
  for (std::size_t i = 1; i < vsd_taus.size(); ++i) {
    if (!(vsd_taus[i] > vsd_taus[i - 1])) {
      throw InputError("threshold grid 'vsd_taus' must be strictly increasing");
    }
  }
}

std::vector<double> vsd_taus_mm(const ThresholdGrid& grid, double diameter) {
  std::vector<double> out;
  for (double f : grid.vsd_taus) out.push_back(f * diameter);
  return out;
}

std::vector<double> mssd_thresholds_mm(const ThresholdGrid& grid, double diameter) {
  std::vector<double> out;
  for (double f : grid.mssd_thetas) out.push_back(f * diameter);
  return out;
}

std::vector<double> mspd_thresholds_px(const ThresholdGrid& grid, int image_width) {
  const double r = image_width / 640.0;
  std::vector<double> out;
  for (double t : grid.mspd_thetas) out.push_back(t * r);
  return out;
}

double average_recall(const RecallGrid& grid) {
  if (grid.expected_cells == 0 || grid.cells.size() != grid.expected_cells) {
    throw InputError("average_recall: " + to_string(grid.function) + " grid has " +
                     std::to_string(grid.cells.size()) + " of " +
                     std::to_string(grid.expected_cells) + " cells");
  }
  double sum = 0.0;
  for (const RecallCell& c : grid.cells) {
    if (!(c.recall >= 0.0 && c.recall <= 1.0)) {
      throw InputError("average_recall: recall outside [0, 1]");
    }
    sum += c.recall;
  }
  return sum / static_cast<double>(grid.cells.size());
}

DatasetRecalls score_dataset(std::span<const GroupErrors> groups,
                             const ThresholdGrid& grid) {
  grid.validate();
  DatasetRecalls out;
  for (const GroupErrors& g : groups) {
    out.num_gt += g.num_gt;
    if (g.vsd.size() != grid.vsd_taus.size()) {
      throw InputError("score_dataset: VSD error tables do not match the tau grid");
    }
  }
  if (out.num_gt == 0) {
    throw InputError("score_dataset: no ground-truth instances to evaluate");
  }
  const double denom = static_cast<double>(out.num_gt);

  auto count_correct = [](std::span<const double> scores, const ErrorMatrix& m, double theta) {
    const auto judged = match_and_judge(scores, m, theta);
    return static_cast<std::size_t>(std::count(judged.begin(), judged.end(), true));
  };

  out.vsd = {ErrorFunction::Vsd, grid.vsd_taus.size() * grid.vsd_thetas.size(), {}};
  for (std::size_t t = 0; t < grid.vsd_taus.size(); ++t) {
    for (double theta : grid.vsd_thetas) {
      std::size_t correct = 0;
      for (const GroupErrors& g : groups) correct += count_correct(g.scores, g.vsd[t], theta);
      out.vsd.cells.push_back({grid.vsd_taus[t], theta, correct / denom});
    }
  }

  out.mssd = {ErrorFunction::Mssd, grid.mssd_thetas.size(), {}};
  for (double theta : grid.mssd_thetas) {
    std::size_t correct = 0;
    for (const GroupErrors& g : groups) {
      correct += count_correct(g.scores, g.mssd, theta * g.diameter);
    }
    out.mssd.cells.push_back({std::nullopt, theta, correct / denom});
  }

  out.mspd = {ErrorFunction::Mspd, grid.mspd_thetas.size(), {}};
  for (double theta : grid.mspd_thetas) {
    std::size_t correct = 0;
    for (const GroupErrors& g : groups) {
      correct += count_correct(g.scores, g.mspd, theta * (g.image_width / 640.0));
    }
    out.mspd.cells.push_back({std::nullopt, theta, correct / denom});
  }
  return out;
}

void compute_average_recalls(DatasetResult& result) {
  result.ar_vsd = average_recall(result.vsd);
  result.ar_mssd = average_recall(result.mssd);
  result.ar_mspd = average_recall(result.mspd);
  result.ar_d = (result.ar_vsd + result.ar_mssd + result.ar_mspd) / 3.0;
}

EvaluationReport aggregate_report(std::vector<DatasetResult> per_dataset,
                                  std::string method) {
  if (per_dataset.empty()) throw InputError("aggregate_report: no datasets");
  EvaluationReport report;
  report.method = std::move(method);
  double ar_sum = 0.0;
  double time_sum = 0.0;
  std::size_t timed = 0;
  for (DatasetResult& d : per_dataset) {
    d.ar_d = (d.ar_vsd + d.ar_mssd + d.ar_mspd) / 3.0;
    ar_sum += d.ar_d;
    if (d.mean_time && d.timed_images > 0) {
      time_sum += *d.mean_time * static_cast<double>(d.timed_images);
      timed += d.timed_images;
    }
  }
  report.ar_core = ar_sum / static_cast<double>(per_dataset.size());
  if (timed > 0) report.mean_time = time_sum / static_cast<double>(timed);
  report.datasets = std::move(per_dataset);
  return report;
}

std::map<ImageKey, double> image_times(std::span<const PoseEstimate> estimates) {
  std::map<ImageKey, double> out;
  std::map<ImageKey, bool> warned;
  for (const PoseEstimate& e : estimates) {
    if (!e.time) continue;
    const ImageKey key{e.scene_id, e.im_id};
    auto [it, inserted] = out.try_emplace(key, *e.time);
    if (inserted) continue;
    if (it->second != *e.time && !warned[key]) {
      warn("scene " + std::to_string(key.scene_id) + " image " + std::to_string(key.im_id) +
           ": rows report different processing times; using the maximum");
      warned[key] = true;
    }
    it->second = std::max(it->second, *e.time);
  }
  return out;
}

}  // namespace bopeval

#include "bopeval/bop_io.hpp"
#include "bopeval/error.hpp"
#include "bopeval/evaluate.hpp"
#include "bopeval/minidataset.hpp"
#include "counting.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>

using namespace bopeval;
namespace fs = std::filesystem;

namespace {

const fs::path kRoot = BOPEVAL_MINIDATASET_DIR;

DatasetInput input_for(const std::string& submission) {
  DatasetInput in;
  in.name = "mini";
  in.root = kRoot;
  in.estimates = read_submission(kRoot / "submissions" / (submission + ".csv"));
  return in;
}

EvaluationOptions quiet(std::size_t workers = 1) {
  EvaluationOptions o;
  o.workers = workers;
  return o;
}

}  // namespace

TEST_CASE("bundled dataset matches the generator") {
  const fs::path tmp = fs::temp_directory_path() / "bopeval_minidataset_test";
  fs::remove_all(tmp);
  write_minidataset(build_minidataset(), tmp);
  for (const auto& entry : fs::recursive_directory_iterator(kRoot)) {
    if (!entry.is_regular_file()) continue;
    const fs::path rel = fs::relative(entry.path(), kRoot);
    CAPTURE(rel);
    CHECK(read_text_file(tmp / rel) == read_text_file(entry.path()));
  }
  const ModelsInfo info = read_models_info(tmp / "models" / "models_info.json");
  CHECK(info.at(1).discrete.size() == 23);
  CHECK(info.at(2).discrete.empty());
  fs::remove_all(tmp);
}

TEST_CASE("perfect and shifted submissions") {
  const DatasetResult perfect = evaluate_dataset(input_for("perfect"), quiet());
  CHECK(perfect.ar_vsd == 1.0);
  CHECK(perfect.ar_mssd == 1.0);
  CHECK(perfect.ar_mspd == 1.0);
  CHECK(perfect.num_gt == 8);
  CHECK(perfect.mean_time == doctest::Approx(0.25));
  const DatasetResult shifted = evaluate_dataset(input_for("shifted"), quiet());
  CHECK(shifted.ar_d == 0.0);
}

TEST_CASE("mixed submission matches the counting oracle") {
  const DatasetInput in = input_for("mixed");
  const DatasetResult got = evaluate_dataset(in, quiet());
  const oracle::Recalls ref = oracle::minidataset_recalls(kRoot, kRoot / "test_targets.json", in.estimates);
  CHECK(std::abs(got.ar_vsd - ref.vsd) < 1e-12);
  CHECK(std::abs(got.ar_mssd - ref.mssd) < 1e-12);
  CHECK(std::abs(got.ar_mspd - ref.mspd) < 1e-12);
  CHECK(got.ar_d > 0.0);
  CHECK(got.ar_d < 1.0);
  CHECK(got.diagnostics.empty());
}

TEST_CASE("perturbed cube") {
  DatasetInput in = input_for("perturbed");
  in.targets = kRoot / "targets_perturbed.json";
  const DatasetResult got = evaluate_dataset(in, quiet());
  CHECK(got.ar_mssd == doctest::Approx(0.6).epsilon(1e-12));
  const oracle::Recalls ref = oracle::minidataset_recalls(kRoot, kRoot / "targets_perturbed.json", in.estimates);
  CHECK(std::abs(got.ar_vsd - ref.vsd) < 1e-12);
  CHECK(std::abs(got.ar_mspd - ref.mspd) < 1e-12);
}

TEST_CASE("empty submission scores zero") {
  DatasetInput in = input_for("perfect");
  in.estimates.clear();
  const DatasetResult got = evaluate_dataset(in, quiet());
  CHECK(got.ar_d == 0.0);
  CHECK(got.num_gt == 8);
  CHECK_FALSE(got.mean_time.has_value());
}

TEST_CASE("estimates behind the camera are diagnosed") {
  DatasetInput in = input_for("perfect");
  in.estimates[0].pose = RigidTransform(Mat3::Identity(), Vec3(0, 0, -500));
  const DatasetResult got = evaluate_dataset(in, quiet());
  CHECK(got.diagnostics.size() == 1);
  CHECK(got.ar_mspd < 1.0);
}

TEST_CASE("results do not depend on the worker count") {
  const std::vector<DatasetInput> in{input_for("mixed")};
  const std::string one = report_to_json(evaluate(in, quiet(1), "m"));
  const std::string three = report_to_json(evaluate(in, quiet(3), "m"));
  CHECK(one == three);
}

TEST_CASE("invalid options are input errors") {
  EvaluationOptions o = quiet();
  o.vsd_delta = 0.0;
  CHECK_THROWS_AS(evaluate_dataset(input_for("perfect"), o), InputError);
  o = quiet();
  o.visib_threshold = 1.5;
  CHECK_THROWS_AS(evaluate_dataset(input_for("perfect"), o), InputError);
  CHECK_THROWS_AS(evaluate({}, quiet()), InputError);
  DatasetInput missing = input_for("perfect");
  missing.root = "/nonexistent";
  CHECK_THROWS_AS(evaluate_dataset(missing, quiet()), InputError);
}

#include "bopeval/bop_io.hpp"
#include "bopeval/error.hpp"
#include "bopeval/scoring.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

using namespace bopeval;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

PoseEstimate estimate(int obj, double score, std::size_t row) {
  PoseEstimate e;
  e.scene_id = 1;
  e.im_id = 0;
  e.obj_id = obj;
  e.score = score;
  e.row = row;
  return e;
}

ErrorMatrix matrix(const std::vector<std::vector<double>>& rows, std::size_t num_gt) {
  ErrorMatrix m(rows.size(), num_gt);
  for (std::size_t e = 0; e < rows.size(); ++e) {
    for (std::size_t g = 0; g < num_gt; ++g) m.at(e, g) = rows[e][g];
  }
  return m;
}

// One GT, one estimate, the same error for every function (in units of the
// diameter for VSD and MSSD, in px for MSPD).
GroupErrors single(double vsd_e, double mssd_e, double mspd_e, double diameter = 200.0) {
  GroupErrors g;
  g.key = {1, 0, 1};
  g.scores = {1.0};
  g.num_gt = 1;
  g.diameter = diameter;
  g.vsd.assign(10, matrix({{vsd_e}}, 1));
  g.mssd = matrix({{mssd_e}}, 1);
  g.mspd = matrix({{mspd_e}}, 1);
  return g;
}

struct RandomGroup {
  GroupErrors group;
  std::vector<std::vector<double>> mssd_rows;
};

RandomGroup random_group(std::mt19937& rng, const ThresholdGrid& grid) {
  std::uniform_int_distribution<int> n_est(0, 4), n_gt(1, 3);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  RandomGroup r;
  GroupErrors& g = r.group;
  g.key = {1, 0, 1};
  g.num_gt = static_cast<std::size_t>(n_gt(rng));
  const std::size_t ne = static_cast<std::size_t>(n_est(rng));
  g.diameter = 50.0 + 200.0 * unit(rng);
  g.image_width = 640;
  auto err = [&](double scale) { return unit(rng) < 0.1 ? kInf : scale * unit(rng); };
  for (std::size_t e = 0; e < ne; ++e) {
    g.scores.push_back(unit(rng));
    r.mssd_rows.emplace_back();
    for (std::size_t j = 0; j < g.num_gt; ++j) r.mssd_rows.back().push_back(err(0.6 * g.diameter));
  }
  g.mssd = matrix(r.mssd_rows, g.num_gt);
  for (std::size_t t = 0; t < grid.vsd_taus.size(); ++t) {
    ErrorMatrix m(ne, g.num_gt);
    for (double& v : m.values) v = err(0.7);
    g.vsd.push_back(m);
  }
  g.mspd = ErrorMatrix(ne, g.num_gt);
  for (double& v : g.mspd.values) v = err(60.0);
  return r;
}

DatasetResult with_ar_d(const std::string& name, double ar) {
  DatasetResult d;
  d.name = name;
  d.ar_vsd = d.ar_mssd = d.ar_mspd = ar;
  return d;
}

}  // namespace

TEST_CASE("top-n selection") {
  TargetCounts targets{{{1, 0, 1}, 2}, {{1, 0, 2}, 3}};
  std::vector<PoseEstimate> ests{estimate(1, 0.1, 0), estimate(1, 0.9, 1), estimate(1, 0.5, 2),
                                 estimate(1, 0.7, 3), estimate(1, 0.3, 4), estimate(2, 0.2, 5),
                                 estimate(3, 0.9, 6)};
  const auto kept = select_top_n(ests, targets);
  REQUIRE(kept.size() == 3);
  CHECK(kept[0].row == 1);
  CHECK(kept[1].row == 3);
  CHECK(kept[2].row == 5);

  std::vector<PoseEstimate> ties{estimate(1, 0.5, 0), estimate(1, 0.5, 1), estimate(1, 0.5, 2)};
  const auto tied = select_top_n(ties, targets);
  REQUIRE(tied.size() == 2);
  CHECK(tied[0].row == 0);
  CHECK(tied[1].row == 1);
}

TEST_CASE("greedy matching examples") {
  const std::vector<double> one{0.5};
  CHECK(match_and_judge(one, matrix({{0.0}}, 1), 1e-9) == std::vector<bool>{true});

  const std::vector<double> scores{0.9, 0.8};
  const ErrorMatrix m = matrix({{5, 50}, {8, 7}}, 2);
  CHECK(match_and_judge(scores, m, 10) == std::vector<bool>{true, true});
  CHECK(match_and_judge(scores, m, 6) == std::vector<bool>{true, false});

  CHECK(match_and_judge(one, matrix({{12.0}}, 1), 10) == std::vector<bool>{false});
  CHECK(match_and_judge(one, matrix({{kInf}}, 1), 1e300) == std::vector<bool>{false});
  CHECK_THROWS_AS(match_and_judge(one, matrix({{std::nan("")}}, 1), 10), InputError);
  CHECK_THROWS_AS(match_and_judge(scores, matrix({{1.0}}, 1), 10), InputError);
}

TEST_CASE("greedy matching agrees with the oracle") {
  std::mt19937 rng(51);
  const ThresholdGrid grid = ThresholdGrid::standard();
  std::size_t differs = 0, instances = 0;
  for (int i = 0; i < 500; ++i) {
    const RandomGroup r = random_group(rng, grid);
    for (double theta : mssd_thresholds_mm(grid, r.group.diameter)) {
      const std::vector<bool> got = match_and_judge(r.group.scores, r.group.mssd, theta);
      CHECK(got == oracle::greedy(r.group.scores, r.mssd_rows, r.group.num_gt, theta));
      const auto correct = static_cast<std::size_t>(std::count(got.begin(), got.end(), true));
      const std::size_t best = oracle::max_matching(r.mssd_rows, theta);
      CHECK(correct <= best);
      ++instances;
      if (correct != best) ++differs;
    }
  }
  MESSAGE("greedy below the maximum matching in " << differs << " of " << instances << " cases");
}

TEST_CASE("threshold grids") {
  const ThresholdGrid grid = ThresholdGrid::standard();
  CHECK(grid.vsd_taus.size() * grid.vsd_thetas.size() == 100);
  CHECK(grid.mssd_thetas.size() == 10);
  const std::vector<double> px = mspd_thresholds_px(grid, 640);
  REQUIRE(px.size() == 10);
  for (int k = 1; k <= 10; ++k) CHECK(px[std::size_t(k - 1)] == 5.0 * k);
  CHECK(mspd_thresholds_px(grid, 1280)[0] == 10.0);
  const std::vector<double> mm = mssd_thresholds_mm(grid, 200.0);
  CHECK(mm.front() == doctest::Approx(10.0));
  CHECK(mm.back() == doctest::Approx(100.0));

  ThresholdGrid bad = grid;
  bad.vsd_taus = {0.2, 0.1};
  CHECK_THROWS_AS(bad.validate(), InputError);
  bad = grid;
  bad.mssd_thetas.clear();
  CHECK_THROWS_AS(bad.validate(), InputError);
}

TEST_CASE("an MSSD error of 0.23 d is correct at 6 of 10 thresholds") {
  const double d = 173.205;
  const std::vector<GroupErrors> groups{single(0.0, 0.23 * d, 0.0, d)};
  const DatasetRecalls r = score_dataset(groups, ThresholdGrid::standard());
  std::size_t correct = 0;
  for (const RecallCell& c : r.mssd.cells) correct += c.recall == 1.0;
  CHECK(correct == 6);
  CHECK(average_recall(r.mssd) == 0.6);
  CHECK(r.vsd.cells.size() == 100);
  CHECK(average_recall(r.vsd) == 1.0);
}

TEST_CASE("recall counting on a small dataset") {
  const ThresholdGrid grid = ThresholdGrid::standard();
  // Two GTs in one group matched by one estimate each, one GT alone, missed.
  GroupErrors a;
  a.key = {1, 0, 1};
  a.scores = {0.9, 0.4};
  a.num_gt = 2;
  a.diameter = 100.0;
  a.vsd.assign(10, matrix({{0.12, 0.9}, {0.9, 0.33}}, 2));
  a.mssd = matrix({{7.0, 80.0}, {60.0, 26.0}}, 2);
  a.mspd = matrix({{3.0, kInf}, {kInf, 49.0}}, 2);
  GroupErrors b = single(1.0, kInf, kInf);
  const std::vector<GroupErrors> groups{a, b};
  const DatasetRecalls r = score_dataset(groups, grid);
  CHECK(r.num_gt == 3);
  // MSSD: 7 < 10 from theta 0.1; 26 < 30 from theta 0.3.
  const std::vector<double> mssd{0, 1, 1, 1, 1, 2, 2, 2, 2, 2};
  for (std::size_t i = 0; i < 10; ++i) CHECK(r.mssd.cells[i].recall == mssd[i] / 3.0);
  // MSPD: 3 < 5 always; 49 < 50 only at the last threshold.
  for (std::size_t i = 0; i < 10; ++i) CHECK(r.mspd.cells[i].recall == (i == 9 ? 2.0 : 1.0) / 3.0);
  // VSD: 0.12 correct from theta 0.15, 0.33 from theta 0.35.
  for (std::size_t t = 0; t < 10; ++t) {
    for (std::size_t k = 0; k < 10; ++k) {
      const double expected = (k >= 2) + (k >= 6);
      CHECK(r.vsd.cells[t * 10 + k].tau == grid.vsd_taus[t]);
      CHECK(r.vsd.cells[t * 10 + k].recall == expected / 3.0);
    }
  }
  CHECK_THROWS_AS(score_dataset(std::vector<GroupErrors>{}, grid), InputError);
}

TEST_CASE("recall grows with theta") {
  std::mt19937 rng(52);
  ThresholdGrid grid = ThresholdGrid::standard();
  for (int i = 0; i < 100; ++i) {
    std::vector<GroupErrors> groups;
    for (int k = 0; k < 5; ++k) groups.push_back(random_group(rng, grid).group);
    const DatasetRecalls r = score_dataset(groups, grid);
    for (const RecallGrid* g : {&r.mssd, &r.mspd}) {
      for (std::size_t c = 1; c < g->cells.size(); ++c) {
        CHECK(g->cells[c].recall >= g->cells[c - 1].recall);
      }
    }
    for (std::size_t t = 0; t < grid.vsd_taus.size(); ++t) {
      for (std::size_t k = 1; k < grid.vsd_thetas.size(); ++k) {
        CHECK(r.vsd.cells[t * 10 + k].recall >= r.vsd.cells[t * 10 + k - 1].recall);
      }
    }
  }
}

TEST_CASE("rescaling confidences changes nothing") {
  std::mt19937 rng(53);
  const ThresholdGrid grid = ThresholdGrid::standard();
  std::uniform_real_distribution<double> factor(0.01, 100.0);
  for (int i = 0; i < 100; ++i) {
    std::vector<GroupErrors> groups;
    for (int k = 0; k < 5; ++k) groups.push_back(random_group(rng, grid).group);
    std::vector<GroupErrors> scaled = groups;
    const double f = factor(rng);
    for (GroupErrors& g : scaled) {
      for (double& s : g.scores) s *= f;
    }
    for (std::size_t k = 0; k < groups.size(); ++k) {
      const double theta = mssd_thresholds_mm(grid, groups[k].diameter)[4];
      CHECK(match_and_judge(groups[k].scores, groups[k].mssd, theta) ==
            match_and_judge(scaled[k].scores, scaled[k].mssd, theta));
    }
    const DatasetRecalls a = score_dataset(groups, grid);
    const DatasetRecalls b = score_dataset(scaled, grid);
    CHECK(a.vsd == b.vsd);
    CHECK(a.mssd == b.mssd);
    CHECK(a.mspd == b.mspd);
  }
}

TEST_CASE("average recall") {
  RecallGrid g{ErrorFunction::Mssd, 2, {{std::nullopt, 0.1, 1.0}, {std::nullopt, 0.2, 1.0}}};
  CHECK(average_recall(g) == 1.0);
  g.expected_cells = 3;
  CHECK_THROWS_AS(average_recall(g), InputError);
  g.expected_cells = 2;
  g.cells[0].recall = 1.5;
  CHECK_THROWS_AS(average_recall(g), InputError);
}

TEST_CASE("aggregation") {
  SUBCASE("single dataset") {
    CHECK(aggregate_report({with_ar_d("a", 0.7)}).ar_core == doctest::Approx(0.7));
  }
  SUBCASE("two datasets") {
    CHECK(aggregate_report({with_ar_d("a", 0.0), with_ar_d("b", 1.0)}).ar_core == 0.5);
  }
  SUBCASE("AR_D is the mean of the three functions") {
    DatasetResult d;
    d.ar_vsd = 0.3;
    d.ar_mssd = 0.5;
    d.ar_mspd = 0.8;
    const EvaluationReport r = aggregate_report({d});
    CHECK(r.datasets[0].ar_d == (0.3 + 0.5 + 0.8) / 3.0);
    CHECK(r.ar_core == r.datasets[0].ar_d);
  }
  SUBCASE("seven-dataset rows") {
    const std::vector<std::pair<std::vector<double>, std::string>> rows{
        {{71.4, 70.1, 93.9, 64.7, 31.3, 71.2, 86.1}, "69.8"},
        {{58.2, 53.8, 87.6, 39.3, 43.5, 70.6, 45.0}, "56.9"}};
    for (const auto& [values, expected] : rows) {
      std::vector<DatasetResult> ds;
      for (double v : values) ds.push_back(with_ar_d("d", v / 100.0));
      CHECK(format_percent(aggregate_report(ds).ar_core) == expected);
    }
  }
  SUBCASE("time is averaged over timed images") {
    DatasetResult a = with_ar_d("a", 0.5), b = with_ar_d("b", 0.5), c = with_ar_d("c", 0.5);
    a.mean_time = 1.0;
    a.timed_images = 3;
    b.mean_time = 3.0;
    b.timed_images = 1;
    const EvaluationReport r = aggregate_report({a, b, c});
    CHECK(r.mean_time == doctest::Approx(1.5));
    CHECK_FALSE(aggregate_report({c}).mean_time.has_value());
  }
  CHECK_THROWS_AS(aggregate_report({}), InputError);
}

TEST_CASE("per-image time takes the maximum and warns on disagreement") {
  std::vector<PoseEstimate> ests{estimate(1, 0.5, 0), estimate(2, 0.5, 1), estimate(3, 0.5, 2)};
  ests[0].time = 0.2;
  ests[1].time = 0.4;
  std::size_t warnings = 0;
  const WarningSink old = set_warning_sink([&](std::string_view) { ++warnings; });
  const auto times = image_times(ests);
  set_warning_sink(old);
  CHECK(times.at({1, 0}) == 0.4);
  CHECK(warnings == 1);
}

// bop_eval: evaluate pose submissions, analyze model symmetries, print
// reports and run the built-in self checks.

#include "bopeval/bop_io.hpp"
#include "bopeval/error.hpp"
#include "bopeval/evaluate.hpp"
#include "bopeval/ply.hpp"
#include "bopeval/selfcheck.hpp"
#include "bopeval/symmetry.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using namespace bopeval;

namespace {

struct NamedPath {
  std::string name;  // empty when given as a bare path
  fs::path path;
};

NamedPath parse_named(const std::string& arg) {
  const auto eq = arg.find('=');
  if (eq == std::string::npos) return {"", arg};
  if (eq == 0) throw InputError("'" + arg + "': missing name before '='");
  return {arg.substr(0, eq), arg.substr(eq + 1)};
}

// Resolves per-dataset values given either as name=path or, with a single
// dataset, as a bare path.
std::map<std::string, fs::path> assign(const std::vector<std::string>& args,
                                       const std::vector<DatasetLocation>& datasets,
                                       const std::string& what) {
  std::map<std::string, fs::path> out;
  for (const std::string& a : args) {
    NamedPath np = parse_named(a);
    if (np.name.empty()) {
      if (datasets.size() != 1) {
        throw InputError(what + " '" + a + "' must be given as <dataset>=<path>");
      }
      np.name = datasets.front().name;
    }
    const bool known = std::any_of(datasets.begin(), datasets.end(),
                                   [&](const DatasetLocation& d) { return d.name == np.name; });
    if (!known) throw InputError(what + " names unknown dataset '" + np.name + "'");
    if (!out.emplace(np.name, np.path).second) {
      throw InputError(what + " given twice for dataset '" + np.name + "'");
    }
  }
  return out;
}

void progress(std::string_view message) { std::cerr << message << '\n'; }

struct EvaluateArgs {
  std::string config;
  std::vector<std::string> submissions;
  std::vector<std::string> datasets;
  std::vector<std::string> targets;
  std::vector<std::string> symmetries;
  std::vector<std::string> texture_filters;
  std::string out = "bop_eval_out";
  std::string method;
  std::string split;
  std::optional<std::size_t> workers;
  std::optional<double> vsd_delta;
  std::optional<double> visib_threshold;
};

int cmd_evaluate(const EvaluateArgs& a) {
  EvalConfig cfg = a.config.empty() ? EvalConfig{} : read_config(a.config);
  for (const std::string& d : a.datasets) {
    const NamedPath np = parse_named(d);
    if (np.name.empty()) throw InputError("--dataset '" + d + "' must be <name>=<root>");
    cfg.datasets.push_back({np.name, np.path});
  }
  if (cfg.datasets.empty()) throw InputError("no dataset given (use --dataset <name>=<root>)");
  if (!a.method.empty()) cfg.method = a.method;
  if (!a.split.empty()) cfg.split = a.split;
  if (a.workers) cfg.workers = *a.workers;
  if (a.vsd_delta) cfg.vsd_delta = *a.vsd_delta;
  if (a.visib_threshold) cfg.visib_threshold = *a.visib_threshold;
  cfg.validate();

  const auto submissions = assign(a.submissions, cfg.datasets, "--submission");
  const auto targets = assign(a.targets, cfg.datasets, "--targets");
  const auto symmetries = assign(a.symmetries, cfg.datasets, "--symmetries");
  const auto textures = assign(a.texture_filters, cfg.datasets, "--texture-filter");

  std::vector<DatasetInput> inputs;
  for (const DatasetLocation& d : cfg.datasets) {
    DatasetInput in;
    in.name = d.name;
    in.root = d.root;
    const auto sub = submissions.find(d.name);
    if (sub == submissions.end()) throw InputError("no submission for dataset '" + d.name + "'");
    in.estimates = read_submission(sub->second);
    if (cfg.method.empty()) cfg.method = sub->second.stem().string();
    if (auto t = targets.find(d.name); t != targets.end()) {
      in.targets = t->second;
    } else if (cfg.targets) {
      in.targets = cfg.targets;
    }
    if (auto s = symmetries.find(d.name); s != symmetries.end()) {
      in.models_info = s->second;
    } else if (cfg.symmetries) {
      in.models_info = cfg.symmetries;
    }
    if (auto t = textures.find(d.name); t != textures.end()) {
      in.texture_filter = t->second;
    } else if (cfg.texture_filter) {
      in.texture_filter = cfg.texture_filter;
    }
    inputs.push_back(std::move(in));
  }

  EvaluationOptions options = options_from_config(cfg);
  options.progress = progress;
  const EvaluationReport report = evaluate(inputs, options, cfg.method);
  write_report(report, a.out);
  std::cout << report_table(report);
  for (const DatasetResult& d : report.datasets) {
    if (!d.diagnostics.empty()) {
      std::cerr << d.name << ": " << d.diagnostics.size()
                << " estimates judged invalid (see report.json)\n";
    }
  }
  std::cerr << "wrote " << (fs::path(a.out) / "report.json").string() << '\n';
  return 0;
}

struct SymmetryArgs {
  std::vector<std::string> models;
  std::optional<double> epsilon;
  std::string out;
  std::size_t workers = 0;
};

int cmd_symmetries(const SymmetryArgs& a) {
  ModelsInfo info;
  for (const std::string& m : a.models) {
    const NamedPath np = parse_named(m);
    int obj_id = 0;
    if (!np.name.empty()) {
      try {
        obj_id = std::stoi(np.name);
      } catch (const std::exception&) {
        throw InputError("'" + m + "': object id must be an integer");
      }
    } else {
      obj_id = static_cast<int>(info.size()) + 1;
    }
    const TriangleMesh mesh = load_mesh(np.path);
    SymmetrySearchOptions opts;
    opts.epsilon = a.epsilon;
    opts.workers = a.workers;
    std::cerr << np.path.string() << ": searching symmetries\n";
    const SymmetryAnalysis analysis = analyze_symmetries(mesh, opts);

    ObjectInfo o;
    o.diameter = mesh.diameter();
    o.has_symmetries = true;
    for (std::size_t i = 1; i < analysis.discrete.size(); ++i) {
      o.discrete.push_back(analysis.discrete[i]);
      o.provenance.push_back(analysis.discrete.provenance()[i]);
    }
    o.continuous = analysis.continuous;
    o.review_notice =
        "Geometric symmetries found by search. Remove any that the model texture "
        "distinguishes before using these annotations.";
    if (analysis.needs_review) {
      o.review_notice += " Several continuous axes were found; keep only the true ones.";
    }
    std::cout << "object " << obj_id << " (" << np.path.string() << "): diameter "
              << mesh.diameter() << " mm, epsilon " << analysis.epsilon << " mm, "
              << analysis.discrete.size() << " discrete (incl. identity), "
              << analysis.continuous.size() << " continuous\n";
    if (!info.emplace(obj_id, std::move(o)).second) {
      throw InputError("object id " + std::to_string(obj_id) + " given twice");
    }
  }
  if (!a.out.empty()) {
    write_models_info(a.out, info);
    std::cerr << "wrote " << a.out << '\n';
  }
  return 0;
}

int cmd_report(const std::string& path, bool diagnostics) {
  const EvaluationReport report = read_report(path);
  std::cout << report_table(report);
  if (diagnostics) {
    for (const DatasetResult& d : report.datasets) {
      for (const std::string& line : d.diagnostics) std::cout << line << '\n';
    }
  }
  return 0;
}

int cmd_selftest(bool corrupt) {
  SelfCheckOptions options;
  options.corrupt = corrupt;
  bool all = true;
  for (const SelfCheckResult& r : run_self_checks(options)) {
    std::printf("%-28s %s  %7.2f s  %s\n", r.name.c_str(), r.passed ? "PASS" : "FAIL",
                r.elapsed.count(), r.detail.c_str());
    all = all && r.passed;
  }
  return all ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"BOP pose-estimation evaluation"};
  app.require_subcommand(1);

  EvaluateArgs ev;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Score a submission");
  evaluate_cmd->add_option("--config", ev.config, "JSON evaluation config");
  evaluate_cmd->add_option("--submission", ev.submissions, "[<dataset>=]<csv>")->required();
  evaluate_cmd->add_option("--dataset", ev.datasets, "<name>=<root> (repeatable)");
  evaluate_cmd->add_option("--targets", ev.targets, "[<dataset>=]<test_targets.json>");
  evaluate_cmd->add_option("--symmetries", ev.symmetries, "[<dataset>=]<models_info.json>");
  evaluate_cmd->add_option("--texture-filter", ev.texture_filters, "[<dataset>=]<json>");
  evaluate_cmd->add_option("--out", ev.out, "Output directory")->capture_default_str();
  evaluate_cmd->add_option("--method", ev.method, "Method name in the report");
  evaluate_cmd->add_option("--split", ev.split, "Dataset split (default test)");
  evaluate_cmd->add_option("--workers", ev.workers, "Worker threads (default: all cores)");
  evaluate_cmd->add_option("--vsd-delta", ev.vsd_delta, "Visibility tolerance in mm");
  evaluate_cmd->add_option("--visib-threshold", ev.visib_threshold,
                           "Minimum visible fraction of a GT instance");

  SymmetryArgs sym;
  auto* sym_cmd = app.add_subcommand("symmetries", "Find the symmetries of PLY models");
  sym_cmd->add_option("models", sym.models, "[<obj_id>=]<model.ply>")->required();
  sym_cmd->add_option("--epsilon", sym.epsilon, "Hausdorff tolerance in mm");
  sym_cmd->add_option("--out", sym.out, "models_info.json to write");
  sym_cmd->add_option("--workers", sym.workers, "Worker threads");

  std::string report_path;
  bool show_diagnostics = false;
  auto* report_cmd = app.add_subcommand("report", "Print a saved report");
  report_cmd->add_option("report", report_path, "report.json")->required();
  report_cmd->add_flag("--diagnostics", show_diagnostics, "List invalid estimates");

  bool corrupt = false;
  auto* selftest_cmd = app.add_subcommand("selftest", "Check the engine against references");
  selftest_cmd->add_flag("--corrupt", corrupt)->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*evaluate_cmd) return cmd_evaluate(ev);
    if (*sym_cmd) return cmd_symmetries(sym);
    if (*report_cmd) return cmd_report(report_path, show_diagnostics);
    if (*selftest_cmd) return cmd_selftest(corrupt);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}

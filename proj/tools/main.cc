// gcnalign command line: dataset statistics, single runs, replay, grid search
// and the weights x initialization ablation.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "gcnalign/datasets.h"
#include "gcnalign/error.h"
#include "gcnalign/experiment.h"

namespace fs = std::filesystem;
using namespace gcnalign;

namespace {

int report_error(std::string_view category, int code, const std::string& message) {
  nlohmann::json j = {{"error", category}, {"message", message}, {"exit_code", code}};
  std::cerr << j.dump() << std::endl;
  return code;
}

RunConfig load_with_overrides(const std::string& path,
                              const std::vector<std::string>& overrides) {
  KeyValueFile kv = KeyValueFile::load(path);
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) {
      fail(ErrorCategory::kInvalidArgument, "--set expects key=value, got '" + o + "'");
    }
    kv.set(std::string(trim(std::string_view(o).substr(0, eq))),
           std::string(trim(std::string_view(o).substr(eq + 1))));
  }
  return RunConfig::from_key_values(kv);
}

std::string count_cell(std::size_t actual, std::optional<std::size_t> expected) {
  std::string s = std::to_string(actual);
  if (expected) s += actual == *expected ? "" : " (expected " + std::to_string(*expected) + ")";
  return s;
}

int cmd_stats(const std::string& dataset, bool pin_manifest, bool as_json) {
  const DatasetDescriptor desc = DatasetDescriptor::parse(dataset);
  if (pin_manifest) write_manifest(desc);
  const GraphPair pair = load(desc);
  const DatasetStatistics s = statistics(pair);
  const auto ref = reference_statistics(desc.family, desc.subset);
  const bool matches = !ref || matches_reference(s, *ref);

  if (as_json) {
    auto side = [](const GraphStatistics& g) {
      nlohmann::json j = {{"triples", g.triples}, {"entities", g.entities},
                          {"relations", g.relations}};
      if (g.directed_alignments) j["directed_alignments"] = *g.directed_alignments;
      return j;
    };
    nlohmann::json j = {{"dataset", desc.to_string()},
                        {"left", side(s.left)},
                        {"right", side(s.right)},
                        {"alignments", s.alignments},
                        {"has_reference", ref.has_value()},
                        {"matches_reference", matches}};
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << desc.to_string() << "\n";
    auto row = [&](const char* name, const GraphStatistics& g, const GraphStatistics* r) {
      std::cout << std::left << std::setw(8) << name
                << " triples " << count_cell(g.triples, r ? std::optional(r->triples) : std::nullopt)
                << "  entities " << count_cell(g.entities, r ? std::optional(r->entities) : std::nullopt)
                << "  relations "
                << count_cell(g.relations, r ? std::optional(r->relations) : std::nullopt);
      if (g.directed_alignments) {
        std::cout << "  directed links "
                  << count_cell(*g.directed_alignments,
                                r ? r->directed_alignments : std::nullopt);
      }
      std::cout << "\n";
    };
    row("left", s.left, ref ? &ref->left : nullptr);
    row("right", s.right, ref ? &ref->right : nullptr);
    std::cout << "alignments " << count_cell(s.alignments, ref ? std::optional(ref->alignments)
                                                               : std::nullopt)
              << "\n";
    if (ref) std::cout << (matches ? "matches published sizes\n" : "DIFFERS from published sizes\n");
  }
  if (!matches) {
    return report_error(to_string(ErrorCategory::kMismatch),
                        exit_code(ErrorCategory::kMismatch),
                        "dataset statistics differ from the published sizes");
  }
  return 0;
}

int cmd_train(const std::string& config, const std::vector<std::string>& overrides,
              bool reuse) {
  const RunConfig cfg = load_with_overrides(config, overrides);
  const RunResult r = run_single(cfg, RunOptions{true, reuse});
  if (r.validation) std::cout << "validation\n" << metrics_to_table(*r.validation) << "\n";
  std::cout << "test\n" << metrics_to_table(r.test);
  std::cout << "run " << r.run_dir.string() << "\n";
  return 0;
}

int cmd_evaluate(const std::string& run_dir) {
  const ReplayResult replay = replay_run(run_dir);
  std::cout << "test (replayed)\n" << metrics_to_table(replay.replayed.test);
  if (!replay.identical) {
    std::cout << "stored\n" << metrics_to_table(replay.stored.test);
    return report_error(to_string(ErrorCategory::kMismatch),
                        exit_code(ErrorCategory::kMismatch),
                        "replayed metrics differ from " + (fs::path(run_dir) / "report.json").string());
  }
  std::cout << "identical to stored report\n";
  return 0;
}

std::vector<GridAxis> axes_from(const KeyValueFile& kv) {
  std::vector<GridAxis> axes;
  for (const auto& key : kv.keys_with_prefix("grid.")) {
    axes.emplace_back(key.substr(5), split_list(*kv.get(key)));
  }
  return axes.empty() ? reference_grid_axes() : axes;
}

int cmd_grid(const std::string& config, const std::vector<std::string>& overrides,
             int workers) {
  const RunConfig base = load_with_overrides(config, overrides);
  const auto axes = axes_from(KeyValueFile::load(config));
  const GridOutcome outcome = run_grid(base, axes, GridOptions{workers, true});
  std::size_t failed = 0;
  for (const auto& e : outcome.entries) failed += e.result ? 0 : 1;
  std::cout << outcome.entries.size() << " grid points, " << failed << " failed\n";
  for (const auto& [setting, best] : outcome.best) {
    std::cout << std::left << std::setw(20) << setting.name()
              << (best ? best->hash() : std::string("(no successful run)")) << "\n";
  }
  std::cout << "leaderboard " << (base.output_dir / "leaderboard.tsv").string() << "\n";
  return 0;
}

int cmd_ablate(const std::string& config, const std::vector<std::string>& overrides,
               int workers, bool no_tuned) {
  const RunConfig base = load_with_overrides(config, overrides);
  const KeyValueFile kv = KeyValueFile::load(config);
  std::vector<DatasetDescriptor> datasets;
  for (const auto& d : kv.get_all("ablation.dataset")) {
    datasets.push_back(DatasetDescriptor::parse(d));
  }
  if (datasets.empty()) datasets.push_back(base.dataset);

  const auto cells = run_ablation(base, datasets, AblationOptions{workers, !no_tuned, true});
  std::string text = "left -> right\n" + ablation_table(cells) + "right -> left\n" +
                     ablation_table(cells, &MetricsReport::right_to_left);
  std::size_t errors = 0;
  for (const auto& c : cells) {
    for (const auto& e : c.errors) {
      text += "error " + c.dataset + " " + c.setting.name() + " " + e + "\n";
      ++errors;
    }
  }
  fs::create_directories(base.output_dir);
  std::ofstream(base.output_dir / "ablation.txt") << text;
  std::cout << text;
  if (errors > 0) {
    return report_error(to_string(ErrorCategory::kNumeric), exit_code(ErrorCategory::kNumeric),
                        std::to_string(errors) + " replicate(s) failed");
  }
  return 0;
}

int cmd_toy(const std::string& dir, int nodes) {
  write_generic_dataset(make_isomorphic_cycles(static_cast<std::size_t>(nodes)), dir);
  std::cout << "wrote " << nodes << "-node cycle pair to " << dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entity alignment with graph convolutional networks"};
  app.require_subcommand(1);

  std::string dataset, config, run_dir, toy_dir;
  std::vector<std::string> overrides;
  bool pin_manifest = false, as_json = false, reuse = false, no_tuned = false;
  int workers = 1, nodes = 8;

  auto* stats = app.add_subcommand("stats", "Print dataset sizes (family:subset:path)");
  stats->add_option("dataset", dataset, "family:subset:path")->required();
  stats->add_flag("--pin-manifest", pin_manifest, "Write MANIFEST checksums before loading");
  stats->add_flag("--json", as_json, "Machine-readable output");

  auto* train = app.add_subcommand("train", "Train and evaluate one configuration");
  train->add_option("config", config)->required()->check(CLI::ExistingFile);
  train->add_option("--set", overrides, "key=value override");
  train->add_flag("--reuse", reuse, "Return a completed run with the same hash");

  auto* evaluate = app.add_subcommand("evaluate", "Replay a run and compare with its report");
  evaluate->add_option("run-dir", run_dir)->required()->check(CLI::ExistingDirectory);

  auto* grid = app.add_subcommand("grid", "Hyperparameter grid (grid.<key> = v1, v2, ...)");
  grid->add_option("config", config)->required()->check(CLI::ExistingFile);
  grid->add_option("--set", overrides, "key=value override");
  grid->add_option("--workers", workers)->check(CLI::PositiveNumber);

  auto* ablate = app.add_subcommand("ablate", "Weights x initialization ablation");
  ablate->add_option("config", config)->required()->check(CLI::ExistingFile);
  ablate->add_option("--set", overrides, "key=value override");
  ablate->add_option("--workers", workers)->check(CLI::PositiveNumber);
  ablate->add_flag("--no-tuned", no_tuned, "Use the config as-is for every setting");

  auto* toy = app.add_subcommand("toy", "Write two isomorphic cycles as a generic dataset");
  toy->add_option("dir", toy_dir)->required();
  toy->add_option("--nodes", nodes)->check(CLI::Range(3, 1 << 20));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    return report_error(to_string(ErrorCategory::kInvalidArgument),
                        exit_code(ErrorCategory::kInvalidArgument), e.what());
  }

  try {
    if (*stats) return cmd_stats(dataset, pin_manifest, as_json);
    if (*train) return cmd_train(config, overrides, reuse);
    if (*evaluate) return cmd_evaluate(run_dir);
    if (*grid) return cmd_grid(config, overrides, workers);
    if (*ablate) return cmd_ablate(config, overrides, workers, no_tuned);
    if (*toy) return cmd_toy(toy_dir, nodes);
  } catch (const Error& e) {
    return report_error(to_string(e.category()), exit_code(e.category()), e.what());
  } catch (const std::exception& e) {
    return report_error(to_string(ErrorCategory::kIo), exit_code(ErrorCategory::kIo), e.what());
  }
  return 0;
}

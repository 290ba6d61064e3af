#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gcnalign/adjacency.h"
#include "gcnalign/config_file.h"
#include "gcnalign/datasets.h"
#include "gcnalign/encoder.h"
#include "gcnalign/evaluation.h"
#include "gcnalign/training.h"

namespace gcnalign {

struct SplitConfig {
  double train_fraction = 0.3;
  double val_fraction = 0.2;
  std::uint64_t seed = 0;
};

// Everything needed to reproduce one experiment. The key-value form written
// by to_key_values() is complete: from_key_values(to_key_values()) yields an
// identical config and identical results.
struct RunConfig {
  DatasetDescriptor dataset;
  AdjacencyConfig adjacency;
  EncoderConfig encoder;
  TrainConfig training;
  ScoreConfig score;
  CandidatePolicy candidate_policy = CandidatePolicy::kTestOnly;
  SplitConfig split;
  int n_seeds = 5;
  // Margin of the separately trained attribute encoder (used when beta < 1).
  double attribute_margin = 3.0;
  int eval_threads = 1;
  std::filesystem::path output_dir = "runs";

  void validate() const;

  KeyValueFile to_key_values() const;
  // Unknown keys are rejected. Keys under "grid." and "ablation." are
  // ignored here; they belong to the grid/ablation commands.
  static RunConfig from_key_values(const KeyValueFile& kv);
  static RunConfig load(const std::filesystem::path& path);

  // Applies a single "section.field = value" override.
  void set(const std::string& key, const std::string& value);

  // Content hash over every field that influences results (output_dir and
  // eval_threads excluded).
  std::string hash() const;

  // Replicate `index` of an n_seeds aggregation: offsets both seeds.
  RunConfig with_replicate(int index) const;
};

struct RunResult {
  RunConfig config;
  std::optional<MetricsReport> validation;
  MetricsReport test;
  std::vector<double> loss_trace;
  std::vector<double> attribute_loss_trace;
  std::filesystem::path run_dir;
  double elapsed_seconds = 0.0;
};

struct RunOptions {
  bool persist = true;
  // Reuse a completed run found under the content-addressed directory.
  bool reuse_existing = false;
};

std::filesystem::path run_directory(const RunConfig& cfg);

// load -> split -> adjacency -> train -> evaluate. Failures are persisted as
// failure.json in the run directory and rethrown.
RunResult run_single(const RunConfig& cfg, const RunOptions& options = {});
RunResult run_single(const RunConfig& cfg, const GraphPair& dataset,
                     const RunOptions& options = {});

// Reads config.txt + report.json of a persisted run.
RunResult load_run(const std::filesystem::path& run_dir);

// Re-executes a persisted run from its own config file. Returns the fresh
// result; `identical` tells whether its metrics match the stored report bit
// for bit.
struct ReplayResult {
  RunResult stored;
  RunResult replayed;
  bool identical = false;
};
ReplayResult replay_run(const std::filesystem::path& run_dir);

// One of the four weights x initialization settings.
struct AblationSetting {
  bool use_weights = false;
  InitPreset init = InitPreset::kUnit;

  std::string name() const;
  friend bool operator==(const AblationSetting&, const AblationSetting&) = default;
};

// (no weights, unit), (no weights, scaled), (weights, unit), (weights, scaled)
const std::vector<AblationSetting>& ablation_settings();

// A grid axis: config key and the values it takes.
using GridAxis = std::pair<std::string, std::vector<std::string>>;

// Optimizer, learning rate, layers, negatives and epochs as searched on
// DBP15k (JAPE) zh-en.
std::vector<GridAxis> reference_grid_axes();

// Cartesian product of the axes for each ablation setting, settings
// outermost. Throws kConfig on an empty axis.
std::vector<RunConfig> enumerate_grid(const RunConfig& base,
                                      const std::vector<GridAxis>& axes);

struct GridEntry {
  RunConfig config;
  AblationSetting setting;
  std::optional<RunResult> result;
  std::string error;  // set when the run failed
};

struct GridOutcome {
  std::vector<GridEntry> entries;
  // Best configuration per ablation setting by validation H@1 (L->R);
  // absent when every run of a setting failed.
  std::vector<std::pair<AblationSetting, std::optional<RunConfig>>> best;
};

struct GridOptions {
  int workers = 1;
  bool reuse_existing = true;
};

// Runs every grid point (seed replicate 0), writes results.tsv (append-only)
// and leaderboard.tsv under base.output_dir.
GridOutcome run_grid(const RunConfig& base, const std::vector<GridAxis>& axes,
                     const GridOptions& options = {});

// Per-dataset best hyperparameters found by the fine-tuning search.
struct TunedHyperparameters {
  OptimizerKind optimizer;
  double learning_rate;
  int n_layers;
  int n_negatives;
  int n_epochs;
};
std::optional<TunedHyperparameters> tuned_hyperparameters(DatasetFamily family,
                                                         std::string_view subset,
                                                         const AblationSetting& setting);
RunConfig apply_tuned(const RunConfig& base, const AblationSetting& setting);

struct MetricSummary {
  double mean = 0.0;
  std::optional<double> stddev;  // sample std, only with >= 2 values
};
MetricSummary summarize(const std::vector<double>& values);

struct AblationCell {
  AblationSetting setting;
  std::string dataset;  // "family subset"
  RunConfig config;
  std::vector<MetricsReport> per_seed;  // test reports
  std::vector<std::string> errors;
  // Keyed "H@1", "H@10", "H@50", "MR", "MRR" for the given direction.
  std::vector<std::pair<std::string, MetricSummary>> summary(
      const DirectionMetrics MetricsReport::* direction = &MetricsReport::left_to_right) const;
};

struct AblationOptions {
  int workers = 1;
  bool use_tuned = true;
  bool reuse_existing = true;
};

// For every dataset and ablation setting: n_seeds runs of the cell config
// (tuned hyperparameters applied when available and requested).
std::vector<AblationCell> run_ablation(const RunConfig& base,
                                       const std::vector<DatasetDescriptor>& datasets,
                                       const AblationOptions& options = {});

// One block per metric, one row per dataset, one "mean ± std" column per
// ablation setting (std omitted with a single seed).
std::string ablation_table(const std::vector<AblationCell>& cells,
                           const DirectionMetrics MetricsReport::* direction =
                               &MetricsReport::left_to_right);

}  // namespace gcnalign

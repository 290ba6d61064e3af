#include "gcnalign/experiment.h"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "gcnalign/error.h"
#include "gcnalign/hashing.h"

namespace gcnalign {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string format_double(double v) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value,
                            const char* expected) {
  fail(ErrorCategory::kConfig,
       "config key '" + key + "': expected " + expected + ", got '" + value + "'");
}

double parse_double(const std::string& key, const std::string& value) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size() || value.empty()) {
    bad_value(key, value, "a number");
  }
  return v;
}

std::int64_t parse_int(const std::string& key, const std::string& value) {
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size() || value.empty()) {
    bad_value(key, value, "an integer");
  }
  return v;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "yes" || value == "1") return true;
  if (value == "false" || value == "no" || value == "0") return false;
  bad_value(key, value, "true/false");
}

std::string bool_text(bool b) { return b ? "true" : "false"; }

}  // namespace

void RunConfig::validate() const {
  dataset.validate();
  encoder.validate();
  training.validate();
  if (!(score.beta >= 0.0 && score.beta <= 1.0)) {
    fail(ErrorCategory::kConfig, "score.beta must lie in [0, 1]");
  }
  if (n_seeds < 1) fail(ErrorCategory::kConfig, "n_seeds must be at least 1");
  if (!(split.train_fraction > 0.0 && split.train_fraction < 1.0) ||
      !(split.val_fraction > 0.0 && split.val_fraction < 1.0)) {
    fail(ErrorCategory::kConfig, "split fractions must lie in (0, 1)");
  }
  if (!(attribute_margin >= 0.0)) {
    fail(ErrorCategory::kConfig, "attribute_margin must be non-negative");
  }
}

void RunConfig::set(const std::string& key, const std::string& value) {
  if (key == "dataset.family") {
    const auto f = parse_family(value);
    if (!f) bad_value(key, value, "a dataset family");
    dataset.family = *f;
  } else if (key == "dataset.subset") {
    dataset.subset = value;
  } else if (key == "dataset.root") {
    dataset.root = value;
  } else if (key == "adjacency.variant") {
    if (value == "count") {
      adjacency.variant = AdjacencyVariant::kCount;
    } else if (value == "functionality") {
      adjacency.variant = AdjacencyVariant::kFunctionality;
    } else {
      bad_value(key, value, "count|functionality");
    }
  } else if (key == "adjacency.clamp") {
    adjacency.clamp = parse_bool(key, value);
  } else if (key == "adjacency.normalization") {
    if (value == "row") {
      adjacency.normalization = DegreeNormalization::kRow;
    } else if (value == "symmetric") {
      adjacency.normalization = DegreeNormalization::kSymmetric;
    } else {
      bad_value(key, value, "row|symmetric");
    }
  } else if (key == "adjacency.self_loops") {
    adjacency.add_self_loops = parse_bool(key, value);
  } else if (key == "encoder.n_layers") {
    encoder.n_layers = static_cast<int>(parse_int(key, value));
  } else if (key == "encoder.dim") {
    encoder.dim = static_cast<int>(parse_int(key, value));
  } else if (key == "encoder.use_weights") {
    encoder.use_weights = parse_bool(key, value);
  } else if (key == "encoder.init") {
    if (value == "unit") {
      encoder.init_preset = InitPreset::kUnit;
    } else if (value == "scaled") {
      encoder.init_preset = InitPreset::kScaled;
    } else if (value == "custom") {
      encoder.init_preset = InitPreset::kCustom;
    } else {
      bad_value(key, value, "unit|scaled|custom");
    }
  } else if (key == "encoder.init_std") {
    encoder.init_std = parse_double(key, value);
  } else if (key == "encoder.normalize_features") {
    encoder.normalize_features = parse_bool(key, value);
  } else if (key == "encoder.seed") {
    encoder.seed = static_cast<std::uint64_t>(parse_int(key, value));
  } else if (key == "training.optimizer") {
    if (value == "adam") {
      training.optimizer = OptimizerKind::kAdam;
    } else if (value == "sgd") {
      training.optimizer = OptimizerKind::kSgd;
    } else {
      bad_value(key, value, "adam|sgd");
    }
  } else if (key == "training.learning_rate") {
    training.learning_rate = parse_double(key, value);
  } else if (key == "training.n_negatives") {
    training.n_negatives = static_cast<int>(parse_int(key, value));
  } else if (key == "training.n_epochs") {
    training.n_epochs = static_cast<int>(parse_int(key, value));
  } else if (key == "training.margin") {
    training.margin = parse_double(key, value);
  } else if (key == "training.reduction") {
    if (value == "mean") {
      training.reduction = LossReduction::kMean;
    } else if (value == "sum") {
      training.reduction = LossReduction::kSum;
    } else {
      bad_value(key, value, "mean|sum");
    }
  } else if (key == "training.seed") {
    training.seed = static_cast<std::uint64_t>(parse_int(key, value));
  } else if (key == "score.beta") {
    score.beta = parse_double(key, value);
  } else if (key == "evaluation.candidate_policy") {
    if (value == "test-only") {
      candidate_policy = CandidatePolicy::kTestOnly;
    } else if (value == "all-entities") {
      candidate_policy = CandidatePolicy::kAllEntities;
    } else {
      bad_value(key, value, "test-only|all-entities");
    }
  } else if (key == "evaluation.threads") {
    eval_threads = static_cast<int>(parse_int(key, value));
  } else if (key == "split.train_fraction") {
    split.train_fraction = parse_double(key, value);
  } else if (key == "split.val_fraction") {
    split.val_fraction = parse_double(key, value);
  } else if (key == "split.seed") {
    split.seed = static_cast<std::uint64_t>(parse_int(key, value));
  } else if (key == "n_seeds") {
    n_seeds = static_cast<int>(parse_int(key, value));
  } else if (key == "attribute_margin") {
    attribute_margin = parse_double(key, value);
  } else if (key == "output_dir") {
    output_dir = value;
  } else {
    fail(ErrorCategory::kConfig, "unknown config key '" + key + "'");
  }
}

KeyValueFile RunConfig::to_key_values() const {
  KeyValueFile kv;
  kv.add("dataset.family", std::string(to_string(dataset.family)));
  kv.add("dataset.subset", dataset.subset);
  kv.add("dataset.root", dataset.root.string());
  kv.add("adjacency.variant",
         adjacency.variant == AdjacencyVariant::kCount ? "count" : "functionality");
  kv.add("adjacency.clamp", bool_text(adjacency.clamp));
  kv.add("adjacency.normalization",
         adjacency.normalization == DegreeNormalization::kRow ? "row" : "symmetric");
  kv.add("adjacency.self_loops", bool_text(adjacency.add_self_loops));
  kv.add("encoder.n_layers", std::to_string(encoder.n_layers));
  kv.add("encoder.dim", std::to_string(encoder.dim));
  kv.add("encoder.use_weights", bool_text(encoder.use_weights));
  kv.add("encoder.init", std::string(to_string(encoder.init_preset)));
  kv.add("encoder.init_std", format_double(encoder.init_std));
  kv.add("encoder.normalize_features", bool_text(encoder.normalize_features));
  kv.add("encoder.seed", std::to_string(encoder.seed));
  kv.add("training.optimizer", std::string(to_string(training.optimizer)));
  kv.add("training.learning_rate", format_double(training.learning_rate));
  kv.add("training.n_negatives", std::to_string(training.n_negatives));
  kv.add("training.n_epochs", std::to_string(training.n_epochs));
  kv.add("training.margin", format_double(training.margin));
  kv.add("training.reduction", std::string(to_string(training.reduction)));
  kv.add("training.seed", std::to_string(training.seed));
  kv.add("score.beta", format_double(score.beta));
  kv.add("evaluation.candidate_policy", std::string(to_string(candidate_policy)));
  kv.add("evaluation.threads", std::to_string(eval_threads));
  kv.add("split.train_fraction", format_double(split.train_fraction));
  kv.add("split.val_fraction", format_double(split.val_fraction));
  kv.add("split.seed", std::to_string(split.seed));
  kv.add("n_seeds", std::to_string(n_seeds));
  kv.add("attribute_margin", format_double(attribute_margin));
  kv.add("output_dir", output_dir.string());
  return kv;
}

RunConfig RunConfig::from_key_values(const KeyValueFile& kv) {
  RunConfig cfg;
  for (const auto& e : kv.entries()) {
    if (e.key.starts_with("grid.") || e.key.starts_with("ablation.")) continue;
    try {
      cfg.set(e.key, e.value);
    } catch (const Error& err) {
      fail(err.category(), kv.source() + ":" + std::to_string(e.line) + ": " + err.what());
    }
  }
  cfg.validate();
  return cfg;
}

RunConfig RunConfig::load(const fs::path& path) {
  return from_key_values(KeyValueFile::load(path));
}

std::string RunConfig::hash() const {
  std::string canonical;
  const KeyValueFile kv = to_key_values();
  for (const auto& e : kv.entries()) {
    if (e.key == "output_dir" || e.key == "evaluation.threads" || e.key == "n_seeds") {
      continue;
    }
    canonical += e.key + "=" + e.value + "\n";
  }
  return sha256_hex(canonical).substr(0, 16);
}

RunConfig RunConfig::with_replicate(int index) const {
  RunConfig cfg = *this;
  cfg.encoder.seed += static_cast<std::uint64_t>(index);
  cfg.training.seed += static_cast<std::uint64_t>(index);
  return cfg;
}

fs::path run_directory(const RunConfig& cfg) { return cfg.output_dir / cfg.hash(); }

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) fail(ErrorCategory::kIo, "cannot write " + path.string());
  out << text;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCategory::kIo, "cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

DenseMatrix attribute_features(const AttributeTable& table, std::size_t width) {
  DenseMatrix m(table.entity_count, width);
  for (std::size_t r = 0; r < table.entity_count; ++r) {
    for (std::size_t c = 0; c < table.dim; ++c) m(r, c) = table.values[r * table.dim + c];
  }
  return m;
}

json run_report_json(const RunResult& r, const std::string& status) {
  json j;
  j["status"] = status;
  j["config_hash"] = r.config.hash();
  j["init_preset"] = std::string(to_string(r.config.encoder.init_preset));
  j["init_std"] = r.config.encoder.resolved_init_std();
  j["encoder_seed"] = r.config.encoder.seed;
  j["training_seed"] = r.config.training.seed;
  j["split_seed"] = r.config.split.seed;
  j["n_seeds"] = r.config.n_seeds;
  j["elapsed_seconds"] = r.elapsed_seconds;
  j["validation"] = r.validation ? json::parse(metrics_to_json(*r.validation)) : json(nullptr);
  j["test"] = json::parse(metrics_to_json(r.test));
  j["final_loss"] = r.loss_trace.empty() ? json(nullptr) : json(r.loss_trace.back());
  return j;
}

void persist_run(const RunResult& r) {
  fs::create_directories(r.run_dir);
  write_text(r.run_dir / "config.txt", r.config.to_key_values().to_string());
  {
    std::ofstream loss(r.run_dir / "loss.tsv");
    write_loss_trace(loss, r.loss_trace);
  }
  if (!r.attribute_loss_trace.empty()) {
    std::ofstream loss(r.run_dir / "attribute_loss.tsv");
    write_loss_trace(loss, r.attribute_loss_trace);
  }
  std::string text;
  if (r.validation) text += "validation\n" + metrics_to_table(*r.validation) + "\n";
  text += "test\n" + metrics_to_table(r.test);
  write_text(r.run_dir / "report.txt", text);
  // report.json last: its presence marks a completed run.
  write_text(r.run_dir / "report.json", run_report_json(r, "ok").dump(2) + "\n");
  fs::remove(r.run_dir / "failure.json");
}

void persist_failure(const RunConfig& cfg, const std::string& category,
                     const std::string& message) {
  const fs::path dir = run_directory(cfg);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) return;
  json j = {{"status", "failed"},
            {"config_hash", cfg.hash()},
            {"category", category},
            {"message", message}};
  std::ofstream(dir / "config.txt") << cfg.to_key_values().to_string();
  std::ofstream(dir / "failure.json") << j.dump(2) << "\n";
}

bool has_completed_run(const fs::path& dir) {
  if (!fs::exists(dir / "report.json")) return false;
  try {
    return json::parse(read_text(dir / "report.json")).at("status") == "ok";
  } catch (const std::exception&) {
    return false;
  }
}

RunResult execute(const RunConfig& cfg, const GraphPair& data) {
  const auto start = std::chrono::steady_clock::now();
  cfg.validate();
  RunResult result;
  result.config = cfg;
  result.run_dir = run_directory(cfg);

  const AlignmentSet alignment =
      split(data.alignment, cfg.split.train_fraction, cfg.split.val_fraction, cfg.split.seed);
  const SparseMatrix adj_left = build_adjacency(data.left, cfg.adjacency);
  const SparseMatrix adj_right = build_adjacency(data.right, cfg.adjacency);
  const auto positives = alignment.with_role(SplitRole::kTrain);

  TrainResult structure = train(
      adj_left, adj_right, positives,
      init_state(cfg.encoder, data.left.entity_count, data.right.entity_count),
      cfg.encoder, cfg.training);
  result.loss_trace = std::move(structure.loss_trace);
  auto [emb_left, emb_right] = forward(adj_left, adj_right, structure.state, cfg.encoder);
  AlignmentEmbeddings emb{std::move(emb_left), std::move(emb_right), {}, {}};

  if (cfg.score.beta < 1.0) {
    if (!data.attributes_left || !data.attributes_right) {
      fail(ErrorCategory::kConfig, "score.beta < 1 but the dataset ships no attributes");
    }
    const std::size_t width =
        std::max(data.attributes_left->dim, data.attributes_right->dim);
    EncoderConfig attr_enc = cfg.encoder;
    attr_enc.dim = static_cast<int>(width);
    TrainConfig attr_train = cfg.training;
    attr_train.margin = cfg.attribute_margin;
    TrainResult attributes = train(
        adj_left, adj_right, positives,
        init_state_from_features(attr_enc, attribute_features(*data.attributes_left, width),
                                 attribute_features(*data.attributes_right, width)),
        attr_enc, attr_train);
    result.attribute_loss_trace = std::move(attributes.loss_trace);
    auto [a_left, a_right] = forward(adj_left, adj_right, attributes.state, attr_enc);
    emb.attribute_left = std::move(a_left);
    emb.attribute_right = std::move(a_right);
  }

  EvaluateOptions eval;
  eval.score = cfg.score;
  eval.policy = cfg.candidate_policy;
  eval.n_threads = cfg.eval_threads;
  if (alignment.count(SplitRole::kValidation) > 0) {
    eval.role = SplitRole::kValidation;
    result.validation = evaluate(emb, alignment, eval);
  }
  eval.role = SplitRole::kTest;
  result.test = evaluate(emb, alignment, eval);
  result.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace

RunResult run_single(const RunConfig& cfg, const GraphPair& dataset,
                     const RunOptions& options) {
  const fs::path dir = run_directory(cfg);
  if (options.reuse_existing && has_completed_run(dir)) {
    return load_run(dir);
  }
  try {
    RunResult result = execute(cfg, dataset);
    if (options.persist) persist_run(result);
    return result;
  } catch (const Error& e) {
    if (options.persist) persist_failure(cfg, std::string(to_string(e.category())), e.what());
    throw;
  }
}

RunResult run_single(const RunConfig& cfg, const RunOptions& options) {
  const fs::path dir = run_directory(cfg);
  if (options.reuse_existing && has_completed_run(dir)) return load_run(dir);
  GraphPair data;
  try {
    data = load(cfg.dataset);
  } catch (const Error& e) {
    if (options.persist) persist_failure(cfg, std::string(to_string(e.category())), e.what());
    throw;
  }
  return run_single(cfg, data, options);
}

RunResult load_run(const fs::path& run_dir) {
  RunResult r;
  r.run_dir = run_dir;
  r.config = RunConfig::load(run_dir / "config.txt");
  json report;
  try {
    report = json::parse(read_text(run_dir / "report.json"));
  } catch (const json::exception& e) {
    fail(ErrorCategory::kIo, (run_dir / "report.json").string() + ": " + e.what());
  }
  if (report.value("status", "") != "ok") {
    fail(ErrorCategory::kIo, run_dir.string() + " does not hold a completed run");
  }
  if (!report.at("validation").is_null()) {
    r.validation = metrics_from_json(report.at("validation").dump());
  }
  r.test = metrics_from_json(report.at("test").dump());
  r.elapsed_seconds = report.value("elapsed_seconds", 0.0);
  {
    std::ifstream loss(run_dir / "loss.tsv");
    if (!loss) fail(ErrorCategory::kIo, "missing loss.tsv in " + run_dir.string());
    r.loss_trace = read_loss_trace(loss);
  }
  if (fs::exists(run_dir / "attribute_loss.tsv")) {
    std::ifstream loss(run_dir / "attribute_loss.tsv");
    r.attribute_loss_trace = read_loss_trace(loss);
  }
  return r;
}

ReplayResult replay_run(const fs::path& run_dir) {
  ReplayResult out;
  out.stored = load_run(run_dir);
  out.replayed = run_single(out.stored.config, RunOptions{false, false});
  out.replayed.run_dir = run_dir;
  out.identical = out.stored.test == out.replayed.test &&
                  out.stored.validation == out.replayed.validation &&
                  out.stored.loss_trace == out.replayed.loss_trace &&
                  out.stored.attribute_loss_trace == out.replayed.attribute_loss_trace;
  return out;
}

std::string AblationSetting::name() const {
  return std::string(use_weights ? "weights" : "no-weights") + "/" +
         std::string(to_string(init));
}

const std::vector<AblationSetting>& ablation_settings() {
  static const std::vector<AblationSetting> kSettings = {
      {false, InitPreset::kUnit},
      {false, InitPreset::kScaled},
      {true, InitPreset::kUnit},
      {true, InitPreset::kScaled},
  };
  return kSettings;
}

std::vector<GridAxis> reference_grid_axes() {
  return {
      {"training.optimizer", {"adam", "sgd"}},
      {"training.learning_rate", {"0.1", "0.5", "1", "10", "20"}},
      {"encoder.n_layers", {"1", "2", "3"}},
      {"training.n_negatives", {"5", "50", "100"}},
      {"training.n_epochs", {"10", "500", "2000", "3000"}},
  };
}

namespace {

RunConfig with_setting(RunConfig cfg, const AblationSetting& s) {
  cfg.encoder.use_weights = s.use_weights;
  cfg.encoder.init_preset = s.init;
  return cfg;
}

}  // namespace

std::vector<RunConfig> enumerate_grid(const RunConfig& base,
                                      const std::vector<GridAxis>& axes) {
  for (const auto& [key, values] : axes) {
    if (values.empty()) fail(ErrorCategory::kConfig, "grid axis '" + key + "' is empty");
  }
  std::vector<RunConfig> out;
  for (const auto& setting : ablation_settings()) {
    std::vector<std::size_t> index(axes.size(), 0);
    while (true) {
      RunConfig cfg = with_setting(base, setting);
      for (std::size_t a = 0; a < axes.size(); ++a) {
        cfg.set(axes[a].first, axes[a].second[index[a]]);
      }
      out.push_back(std::move(cfg));
      // odometer increment, last axis fastest
      std::size_t a = axes.size();
      while (a > 0) {
        --a;
        if (++index[a] < axes[a].second.size()) break;
        index[a] = 0;
        if (a == 0) {
          a = axes.size() + 1;
          break;
        }
      }
      if (axes.empty() || a == axes.size() + 1) break;
    }
  }
  return out;
}

namespace {

// Runs jobs[i] on a pool of workers; job exceptions are the caller's business.
template <typename Job>
void run_pool(std::size_t n_jobs, int workers, Job job) {
  std::atomic<std::size_t> next{0};
  auto loop = [&] {
    for (std::size_t i = next++; i < n_jobs; i = next++) job(i);
  };
  const int n = std::max(1, std::min<int>(workers, static_cast<int>(n_jobs)));
  if (n <= 1) {
    loop();
    return;
  }
  std::vector<std::thread> threads;
  for (int t = 0; t < n; ++t) threads.emplace_back(loop);
  for (auto& t : threads) t.join();
}

// Append-only TSV ledger; every append happens under one lock.
class ResultsLedger {
 public:
  explicit ResultsLedger(const fs::path& path) : path_(path) {
    fs::create_directories(path.parent_path());
    if (!fs::exists(path_)) {
      std::ofstream(path_) << "config_hash\tsetting\tstatus\tval_h1\ttest_h1\ttest_mrr\tdetail\n";
    }
  }

  void append(const std::string& line) {
    std::lock_guard<std::mutex> lock(mu_);
    std::ofstream(path_, std::ios::app) << line << '\n';
  }

 private:
  fs::path path_;
  std::mutex mu_;
};

std::string fixed2(double v) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(2) << v;
  return out.str();
}

double validation_h1(const RunResult& r) {
  const MetricsReport& m = r.validation ? *r.validation : r.test;
  return m.left_to_right.hits_at.count(1) ? m.left_to_right.hits_at.at(1) : 0.0;
}

std::string axis_summary(const RunConfig& cfg, const std::vector<GridAxis>& axes) {
  const KeyValueFile kv = cfg.to_key_values();
  std::string out;
  for (const auto& [key, values] : axes) {
    if (!out.empty()) out += " ";
    out += key + "=" + kv.get(key).value_or("?");
  }
  return out;
}

}  // namespace

GridOutcome run_grid(const RunConfig& base, const std::vector<GridAxis>& axes,
                     const GridOptions& options) {
  const auto configs = enumerate_grid(base, axes);
  const GraphPair data = load(base.dataset);
  ResultsLedger ledger(base.output_dir / "results.tsv");

  GridOutcome outcome;
  const std::size_t per_setting = configs.size() / ablation_settings().size();
  for (std::size_t i = 0; i < configs.size(); ++i) {
    outcome.entries.push_back({configs[i], ablation_settings()[i / per_setting], {}, {}});
  }

  run_pool(outcome.entries.size(), options.workers, [&](std::size_t i) {
    GridEntry& entry = outcome.entries[i];
    try {
      entry.result = run_single(entry.config, data, RunOptions{true, options.reuse_existing});
      const auto& r = *entry.result;
      ledger.append(entry.config.hash() + "\t" + entry.setting.name() + "\tok\t" +
                    fixed2(validation_h1(r)) + "\t" +
                    fixed2(r.test.left_to_right.hits_at.at(1)) + "\t" +
                    format_double(r.test.left_to_right.mrr) + "\t" +
                    axis_summary(entry.config, axes));
    } catch (const Error& e) {
      entry.error = std::string(to_string(e.category())) + ": " + e.what();
      ledger.append(entry.config.hash() + "\t" + entry.setting.name() + "\tfailed\t\t\t\t" +
                    entry.error);
    }
  });

  std::ofstream board(base.output_dir / "leaderboard.tsv");
  board << "setting\trank\tconfig_hash\tval_h1\ttest_h1\ttest_mr\ttest_mrr\tparameters\n";
  fs::create_directories(base.output_dir / "best");
  for (const auto& setting : ablation_settings()) {
    std::vector<const GridEntry*> ok;
    for (const auto& e : outcome.entries) {
      if (e.setting == setting && e.result) ok.push_back(&e);
    }
    // stable: ties keep enumeration order
    std::stable_sort(ok.begin(), ok.end(), [](const GridEntry* a, const GridEntry* b) {
      return validation_h1(*a->result) > validation_h1(*b->result);
    });
    for (std::size_t rank = 0; rank < ok.size(); ++rank) {
      const RunResult& r = *ok[rank]->result;
      board << setting.name() << '\t' << rank + 1 << '\t' << r.config.hash() << '\t'
            << fixed2(validation_h1(r)) << '\t' << fixed2(r.test.left_to_right.hits_at.at(1))
            << '\t' << fixed2(r.test.left_to_right.mean_rank) << '\t'
            << format_double(r.test.left_to_right.mrr) << '\t'
            << axis_summary(r.config, axes) << '\n';
    }
    std::optional<RunConfig> best;
    if (!ok.empty()) {
      best = ok.front()->config;
      std::string file = setting.name();
      std::replace(file.begin(), file.end(), '/', '_');
      write_text(base.output_dir / "best" / (file + ".conf"),
                 best->to_key_values().to_string());
    }
    outcome.best.emplace_back(setting, std::move(best));
  }
  return outcome;
}

std::optional<TunedHyperparameters> tuned_hyperparameters(DatasetFamily family,
                                                         std::string_view subset,
                                                         const AblationSetting& setting) {
  struct Row {
    bool weights;
    InitPreset init;
    DatasetFamily family;
    const char* subset;
    int epochs;
    int layers;
    double lr;
  };
  using F = DatasetFamily;
  constexpr auto U = InitPreset::kUnit;
  constexpr auto S = InitPreset::kScaled;
  static const std::vector<Row> kRows = {
      {false, U, F::kDbp15kFull, "fr-en", 2000, 2, 1.0},
      {false, U, F::kDbp15kFull, "ja-en", 2000, 3, 1.0},
      {false, U, F::kDbp15kFull, "zh-en", 2000, 4, 1.0},
      {false, U, F::kDbp15kJape, "fr-en", 2000, 2, 1.0},
      {false, U, F::kDbp15kJape, "ja-en", 2000, 2, 1.0},
      {false, U, F::kDbp15kJape, "zh-en", 2000, 2, 1.0},
      {false, U, F::kDwy100k, "dbp-wd", 2000, 2, 1.0},
      {false, U, F::kDwy100k, "dbp-yg", 2000, 2, 1.0},
      {false, U, F::kWk3l120k, "en-de", 2000, 2, 1.0},
      {false, U, F::kWk3l120k, "en-fr", 2000, 2, 1.0},
      {false, U, F::kWk3l15k, "en-de", 2000, 2, 1.0},
      {false, U, F::kWk3l15k, "en-fr", 2000, 2, 10.0},
      {true, U, F::kDbp15kFull, "fr-en", 2000, 4, 1.0},
      {true, U, F::kDbp15kFull, "ja-en", 2000, 4, 1.0},
      {true, U, F::kDbp15kFull, "zh-en", 2000, 3, 1.0},
      {true, U, F::kDbp15kJape, "fr-en", 2000, 2, 10.0},
      {true, U, F::kDbp15kJape, "ja-en", 2000, 3, 1.0},
      {true, U, F::kDbp15kJape, "zh-en", 2000, 3, 1.0},
      {true, U, F::kDwy100k, "dbp-wd", 2000, 2, 1.0},
      {true, U, F::kDwy100k, "dbp-yg", 2000, 2, 1.0},
      {true, U, F::kWk3l120k, "en-de", 2000, 2, 1.0},
      {true, U, F::kWk3l120k, "en-fr", 2000, 2, 1.0},
      {true, U, F::kWk3l15k, "en-de", 2000, 2, 1.0},
      {true, U, F::kWk3l15k, "en-fr", 2000, 2, 1.0},
      {false, S, F::kDbp15kFull, "fr-en", 3000, 2, 1.0},
      {false, S, F::kDbp15kFull, "ja-en", 3000, 2, 1.0},
      {false, S, F::kDbp15kFull, "zh-en", 2000, 4, 1.0},
      {false, S, F::kDbp15kJape, "fr-en", 3000, 2, 1.0},
      {false, S, F::kDbp15kJape, "ja-en", 2000, 2, 1.0},
      {false, S, F::kDbp15kJape, "zh-en", 3000, 2, 1.0},
      {false, S, F::kDwy100k, "dbp-wd", 3000, 2, 1.0},
      {false, S, F::kDwy100k, "dbp-yg", 3000, 2, 1.0},
      {false, S, F::kWk3l120k, "en-de", 3000, 2, 0.5},
      {false, S, F::kWk3l120k, "en-fr", 3000, 2, 1.0},
      {false, S, F::kWk3l15k, "en-de", 3000, 2, 0.5},
      {false, S, F::kWk3l15k, "en-fr", 3000, 2, 1.0},
      {true, S, F::kDbp15kFull, "fr-en", 2000, 4, 1.0},
      {true, S, F::kDbp15kFull, "ja-en", 2000, 4, 1.0},
      {true, S, F::kDbp15kFull, "zh-en", 2000, 4, 1.0},
      {true, S, F::kDbp15kJape, "fr-en", 2000, 2, 1.0},
      {true, S, F::kDbp15kJape, "ja-en", 2000, 2, 1.0},
      {true, S, F::kDbp15kJape, "zh-en", 2000, 2, 1.0},
      {true, S, F::kDwy100k, "dbp-wd", 2000, 2, 1.0},
      {true, S, F::kDwy100k, "dbp-yg", 3000, 2, 0.5},
      {true, S, F::kWk3l120k, "en-de", 2000, 2, 1.0},
      {true, S, F::kWk3l120k, "en-fr", 2000, 2, 1.0},
      {true, S, F::kWk3l15k, "en-de", 2000, 2, 1.0},
      {true, S, F::kWk3l15k, "en-fr", 2000, 2, 1.0},
  };
  // Optimizer and negatives are shared by all datasets of a setting.
  const bool sgd_setting = !setting.use_weights && setting.init == InitPreset::kScaled;
  for (const Row& row : kRows) {
    if (row.weights == setting.use_weights && row.init == setting.init &&
        row.family == family && subset == row.subset) {
      return TunedHyperparameters{sgd_setting ? OptimizerKind::kSgd : OptimizerKind::kAdam,
                                  row.lr, row.layers, sgd_setting ? 100 : 50, row.epochs};
    }
  }
  return std::nullopt;
}

RunConfig apply_tuned(const RunConfig& base, const AblationSetting& setting) {
  RunConfig cfg = with_setting(base, setting);
  if (const auto tuned =
          tuned_hyperparameters(base.dataset.family, base.dataset.subset, setting)) {
    cfg.training.optimizer = tuned->optimizer;
    cfg.training.learning_rate = tuned->learning_rate;
    cfg.encoder.n_layers = tuned->n_layers;
    cfg.training.n_negatives = tuned->n_negatives;
    cfg.training.n_epochs = tuned->n_epochs;
  }
  return cfg;
}

MetricSummary summarize(const std::vector<double>& values) {
  MetricSummary s;
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  if (values.size() >= 2) {
    double sq = 0.0;
    for (double v : values) sq += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(sq / static_cast<double>(values.size() - 1));
  }
  return s;
}

std::vector<std::pair<std::string, MetricSummary>> AblationCell::summary(
    const DirectionMetrics MetricsReport::* direction) const {
  std::vector<std::pair<std::string, std::vector<double>>> columns = {
      {"H@1", {}}, {"H@10", {}}, {"H@50", {}}, {"MR", {}}, {"MRR", {}}};
  for (const auto& report : per_seed) {
    const DirectionMetrics& m = report.*direction;
    auto hit = [&](int k) { return m.hits_at.count(k) ? m.hits_at.at(k) : 0.0; };
    columns[0].second.push_back(hit(1));
    columns[1].second.push_back(hit(10));
    columns[2].second.push_back(hit(50));
    columns[3].second.push_back(m.mean_rank);
    columns[4].second.push_back(m.mrr);
  }
  std::vector<std::pair<std::string, MetricSummary>> out;
  for (const auto& [name, values] : columns) out.emplace_back(name, summarize(values));
  return out;
}

std::vector<AblationCell> run_ablation(const RunConfig& base,
                                       const std::vector<DatasetDescriptor>& datasets,
                                       const AblationOptions& options) {
  std::vector<AblationCell> cells;
  std::vector<GraphPair> loaded;
  loaded.reserve(datasets.size());
  for (const auto& d : datasets) {
    loaded.push_back(load(d));
    for (const auto& setting : ablation_settings()) {
      RunConfig cfg = base;
      cfg.dataset = d;
      cfg = options.use_tuned ? apply_tuned(cfg, setting) : with_setting(cfg, setting);
      AblationCell cell;
      cell.setting = setting;
      cell.dataset = std::string(to_string(d.family)) + " " + d.subset;
      cell.config = cfg;
      cell.per_seed.resize(cfg.n_seeds);
      cells.push_back(std::move(cell));
    }
  }

  struct Job {
    std::size_t cell;
    std::size_t dataset;
    int seed;
  };
  std::vector<Job> jobs;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    for (int s = 0; s < cells[c].config.n_seeds; ++s) {
      jobs.push_back({c, c / ablation_settings().size(), s});
    }
  }
  std::vector<std::string> job_errors(jobs.size());
  std::vector<char> job_ok(jobs.size(), 0);
  run_pool(jobs.size(), options.workers, [&](std::size_t i) {
    const Job& job = jobs[i];
    AblationCell& cell = cells[job.cell];
    try {
      const RunResult r = run_single(cell.config.with_replicate(job.seed), loaded[job.dataset],
                                     RunOptions{true, options.reuse_existing});
      cell.per_seed[job.seed] = r.test;
      job_ok[i] = 1;
    } catch (const Error& e) {
      job_errors[i] = "seed " + std::to_string(job.seed) + ": " + e.what();
    }
  });

  // Drop failed replicates (in seed order) and keep their messages.
  for (std::size_t c = 0; c < cells.size(); ++c) {
    std::vector<MetricsReport> ok;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      if (jobs[i].cell != c) continue;
      if (job_ok[i]) {
        ok.push_back(cells[c].per_seed[jobs[i].seed]);
      } else {
        cells[c].errors.push_back(job_errors[i]);
      }
    }
    cells[c].per_seed = std::move(ok);
  }
  return cells;
}

std::string ablation_table(const std::vector<AblationCell>& cells,
                           const DirectionMetrics MetricsReport::* direction) {
  std::vector<std::string> datasets;
  for (const auto& c : cells) {
    if (std::find(datasets.begin(), datasets.end(), c.dataset) == datasets.end()) {
      datasets.push_back(c.dataset);
    }
  }
  const auto& settings = ablation_settings();
  constexpr int kNameWidth = 24;
  constexpr int kColWidth = 20;

  std::ostringstream out;
  const std::vector<std::string> metrics = {"H@1", "H@10", "MR", "MRR"};
  for (const auto& metric : metrics) {
    out << metric << (metric == "MRR" ? " (%)" : "") << '\n';
    out << std::left << std::setw(kNameWidth) << "dataset";
    for (const auto& s : settings) out << std::right << std::setw(kColWidth) << s.name();
    out << '\n';
    for (const auto& d : datasets) {
      out << std::left << std::setw(kNameWidth) << d;
      for (const auto& s : settings) {
        std::string text = "-";
        for (const auto& c : cells) {
          if (c.dataset != d || !(c.setting == s) || c.per_seed.empty()) continue;
          for (const auto& [name, summary] : c.summary(direction)) {
            if (name != metric) continue;
            const double scale = metric == "MRR" ? 100.0 : 1.0;
            text = fixed2(summary.mean * scale);
            if (summary.stddev) text += " ± " + fixed2(*summary.stddev * scale);
          }
        }
        // "±" is two bytes in UTF-8 but one column wide.
        const int pad = text.find("±") != std::string::npos ? 1 : 0;
        out << std::right << std::setw(kColWidth + pad) << text;
      }
      out << '\n';
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace gcnalign

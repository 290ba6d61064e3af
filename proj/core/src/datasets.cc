#include "gcnalign/datasets.h"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <memory>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <tuple>

#include "gcnalign/error.h"
#include "gcnalign/hashing.h"

namespace gcnalign {

namespace fs = std::filesystem;

std::string_view to_string(DatasetFamily family) {
  switch (family) {
    case DatasetFamily::kDbp15kFull:
      return "dbp15k-full";
    case DatasetFamily::kDbp15kJape:
      return "dbp15k-jape";
    case DatasetFamily::kWk3l15k:
      return "wk3l-15k";
    case DatasetFamily::kWk3l120k:
      return "wk3l-120k";
    case DatasetFamily::kDwy100k:
      return "dwy100k";
    case DatasetFamily::kGeneric:
      return "generic";
  }
  return "unknown";
}

std::optional<DatasetFamily> parse_family(std::string_view name) {
  for (auto f : {DatasetFamily::kDbp15kFull, DatasetFamily::kDbp15kJape,
                 DatasetFamily::kWk3l15k, DatasetFamily::kWk3l120k,
                 DatasetFamily::kDwy100k, DatasetFamily::kGeneric}) {
    if (to_string(f) == name) return f;
  }
  return std::nullopt;
}

namespace {

std::vector<std::string> known_subsets(DatasetFamily family) {
  switch (family) {
    case DatasetFamily::kDbp15kFull:
    case DatasetFamily::kDbp15kJape:
      return {"fr-en", "ja-en", "zh-en"};
    case DatasetFamily::kWk3l15k:
    case DatasetFamily::kWk3l120k:
      return {"en-de", "en-fr"};
    case DatasetFamily::kDwy100k:
      return {"dbp-wd", "dbp-yg"};
    case DatasetFamily::kGeneric:
      return {};
  }
  return {};
}

}  // namespace

void DatasetDescriptor::validate() const {
  if (family == DatasetFamily::kGeneric) return;
  const auto subsets = known_subsets(family);
  if (std::find(subsets.begin(), subsets.end(), subset) == subsets.end()) {
    fail(ErrorCategory::kConfig, "unknown subset '" + subset + "' for dataset family " +
                                     std::string(gcnalign::to_string(family)));
  }
}

DatasetDescriptor DatasetDescriptor::parse(std::string_view text) {
  const auto first = text.find(':');
  const auto second = first == std::string_view::npos ? first : text.find(':', first + 1);
  if (second == std::string_view::npos) {
    fail(ErrorCategory::kConfig,
         "dataset must be given as family:subset:path, got '" + std::string(text) + "'");
  }
  const auto family = parse_family(text.substr(0, first));
  if (!family) {
    fail(ErrorCategory::kConfig,
         "unknown dataset family '" + std::string(text.substr(0, first)) + "'");
  }
  DatasetDescriptor d;
  d.family = *family;
  d.subset = std::string(text.substr(first + 1, second - first - 1));
  d.root = std::string(text.substr(second + 1));
  if (d.family == DatasetFamily::kDwy100k && (d.subset == "wd" || d.subset == "yg")) {
    d.subset = "dbp-" + d.subset;
  }
  d.validate();
  return d;
}

std::string DatasetDescriptor::to_string() const {
  return std::string(gcnalign::to_string(family)) + ":" + subset + ":" + root.string();
}

DatasetStatistics statistics(const GraphPair& pair) {
  DatasetStatistics s;
  s.left = {pair.left.triples.size(), pair.left.entity_count, pair.left.relation_count,
            std::nullopt};
  s.right = {pair.right.triples.size(), pair.right.entity_count,
             pair.right.relation_count, std::nullopt};
  s.alignments = pair.alignment.pairs.size();
  if (pair.directed_alignment_counts) {
    s.left.directed_alignments = pair.directed_alignment_counts->first;
    s.right.directed_alignments = pair.directed_alignment_counts->second;
    s.symmetrized_alignments = pair.alignment.pairs.size();
  }
  return s;
}

std::optional<DatasetStatistics> reference_statistics(DatasetFamily family,
                                                      std::string_view subset) {
  struct Row {
    DatasetFamily family;
    const char* subset;
    GraphStatistics left;
    GraphStatistics right;
    std::size_t alignments;
    std::optional<std::size_t> symmetrized;
  };
  using F = DatasetFamily;
  static const std::array<Row, 12> kRows = {{
      {F::kDbp15kFull, "fr-en", {192191, 66858, 1379, {}}, {278590, 105889, 2209, {}}, 15000, {}},
      {F::kDbp15kFull, "ja-en", {164373, 65744, 2043, {}}, {233319, 95680, 2096, {}}, 15000, {}},
      {F::kDbp15kFull, "zh-en", {153929, 66469, 2830, {}}, {237674, 98125, 2317, {}}, 15000, {}},
      {F::kDbp15kJape, "fr-en", {105998, 19661, 903, {}}, {115722, 19993, 1208, {}}, 15000, {}},
      {F::kDbp15kJape, "ja-en", {77214, 19814, 1299, {}}, {93484, 19780, 1153, {}}, 15000, {}},
      {F::kDbp15kJape, "zh-en", {70414, 19388, 1701, {}}, {95142, 19572, 1323, {}}, 15000, {}},
      {F::kWk3l15k, "en-de", {209041, 15127, 1841, 1289}, {144244, 14603, 596, 1140}, 10383, 10383},
      {F::kWk3l15k, "en-fr", {203356, 15170, 2228, 2498}, {169329, 15393, 2422, 3812}, 8024, 8024},
      {F::kWk3l120k, "en-de", {624659, 67650, 2393, 6173}, {389554, 61942, 861, 4820}, 50280, 50280},
      {F::kWk3l120k, "en-fr", {1375406, 119749, 3109, 36749}, {760497, 118592, 2336, 36013}, 87836, 87836},
      {F::kDwy100k, "dbp-wd", {463294, 100000, 330, {}}, {448774, 100000, 220, {}}, 100000, {}},
      {F::kDwy100k, "dbp-yg", {428952, 100000, 302, {}}, {502563, 100000, 31, {}}, 100000, {}},
  }};
  for (const Row& row : kRows) {
    if (row.family == family && subset == row.subset) {
      return DatasetStatistics{row.left, row.right, row.alignments, row.symmetrized};
    }
  }
  return std::nullopt;
}

bool matches_reference(const DatasetStatistics& actual, const DatasetStatistics& reference) {
  if (!(actual.left == reference.left) || !(actual.right == reference.right)) return false;
  if (!reference.symmetrized_alignments) return actual.alignments == reference.alignments;
  const double expected = static_cast<double>(*reference.symmetrized_alignments);
  return std::abs(static_cast<double>(actual.alignments) - expected) <= 0.01 * expected;
}

std::vector<DatasetFile> dataset_layout(DatasetFamily family) {
  std::vector<DatasetFile> files = {
      {"entities_left", "ent_ids_1", true},
      {"entities_right", "ent_ids_2", true},
      {"relations_left", "rel_ids_1", false},
      {"relations_right", "rel_ids_2", false},
      {"triples_left", "triples_1", true},
      {"triples_right", "triples_2", true},
      {"attributes_left", "training_attrs_1", false},
      {"attributes_right", "training_attrs_2", false},
  };
  switch (family) {
    case DatasetFamily::kDbp15kJape:
    case DatasetFamily::kDwy100k:
      files.push_back({"train_alignment", "sup_ent_ids", true});
      files.push_back({"test_alignment", "ref_ent_ids", true});
      break;
    case DatasetFamily::kDbp15kFull:
      files.push_back({"alignment", "ent_ILLs", true});
      break;
    case DatasetFamily::kWk3l15k:
    case DatasetFamily::kWk3l120k:
      files.push_back({"links_left_to_right", "ent_links_1to2", true});
      files.push_back({"links_right_to_left", "ent_links_2to1", true});
      files.push_back({"triple_links", "triple_links", true});
      break;
    case DatasetFamily::kGeneric:
      files.push_back({"train_alignment", "sup_ent_ids", false});
      files.push_back({"test_alignment", "ref_ent_ids", false});
      files.push_back({"alignment", "ent_links", false});
      break;
  }
  return files;
}

namespace {

// Tab-separated line reader: trailing whitespace is stripped, blank lines
// are rejected, every error names file and line.
class TsvReader {
 public:
  explicit TsvReader(fs::path path) : path_(std::move(path)), in_(path_) {
    if (!in_) fail(ErrorCategory::kIo, "cannot open " + path_.string());
  }

  bool next() {
    if (!std::getline(in_, line_)) return false;
    ++line_no_;
    const auto end = line_.find_last_not_of(" \t\r\n");
    line_.erase(end == std::string::npos ? 0 : end + 1);
    if (line_.empty()) error("blank line");
    fields_.clear();
    std::string_view rest = line_;
    while (true) {
      const auto tab = rest.find('\t');
      fields_.push_back(rest.substr(0, tab));
      if (tab == std::string_view::npos) break;
      rest = rest.substr(tab + 1);
    }
    return true;
  }

  const std::vector<std::string_view>& fields() const { return fields_; }
  const std::string& line() const { return line_; }
  int line_no() const { return line_no_; }

  void expect_columns(std::size_t n) const {
    if (fields_.size() != n) {
      error("expected " + std::to_string(n) + " tab-separated columns, got " +
            std::to_string(fields_.size()));
    }
  }

  std::int64_t integer(std::size_t column) const {
    const auto f = fields_.at(column);
    std::int64_t value = 0;
    const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), value);
    if (ec != std::errc() || ptr != f.data() + f.size() || f.empty()) {
      error("column " + std::to_string(column + 1) + " is not an integer: '" +
            std::string(f) + "'");
    }
    return value;
  }

  [[noreturn]] void error(const std::string& what) const {
    fail(ErrorCategory::kDataset,
         path_.string() + ":" + std::to_string(line_no_) + ": " + what);
  }

 private:
  fs::path path_;
  std::ifstream in_;
  std::string line_;
  std::vector<std::string_view> fields_;
  int line_no_ = 0;
};

EntityId lookup(const IdMap& map, std::int64_t id, const TsvReader& reader,
                const char* what) {
  const auto it = map.index.find(id);
  if (it == map.index.end()) {
    reader.error(std::string("dangling ") + what + " id " + std::to_string(id));
  }
  return it->second;
}

}  // namespace

IdMap read_id_map(const fs::path& path) {
  IdMap map;
  TsvReader reader(path);
  while (reader.next()) {
    if (reader.fields().size() < 2) reader.expect_columns(2);
    const auto id = reader.integer(0);
    // Labels may themselves contain tabs; keep everything after the first.
    const auto& line = reader.line();
    std::string label = line.substr(line.find('\t') + 1);
    if (!map.index.emplace(id, static_cast<EntityId>(map.labels.size())).second) {
      reader.error("duplicate id " + std::to_string(id));
    }
    map.labels.push_back(std::move(label));
  }
  if (map.labels.empty()) {
    fail(ErrorCategory::kDataset, path.string() + ": empty id map");
  }
  return map;
}

namespace {

struct LoadedGraph {
  KnowledgeGraph graph;
  IdMap entities;
};

LoadedGraph load_graph(const fs::path& entity_file, const fs::path& relation_file,
                       const fs::path& triple_file) {
  LoadedGraph out;
  out.entities = read_id_map(entity_file);
  out.graph.entity_count = out.entities.labels.size();
  out.graph.entity_labels = out.entities.labels;

  IdMap relations;
  const bool have_relation_map = fs::exists(relation_file);
  if (have_relation_map) relations = read_id_map(relation_file);

  struct RawTriple {
    EntityId head;
    std::int64_t relation;
    EntityId tail;
  };
  std::vector<RawTriple> raw;
  TsvReader reader(triple_file);
  while (reader.next()) {
    reader.expect_columns(3);
    const EntityId h = lookup(out.entities, reader.integer(0), reader, "head entity");
    const std::int64_t r = reader.integer(1);
    const EntityId t = lookup(out.entities, reader.integer(2), reader, "tail entity");
    if (have_relation_map) lookup(relations, r, reader, "relation");
    raw.push_back({h, r, t});
  }
  if (raw.empty()) {
    fail(ErrorCategory::kDataset, triple_file.string() + ": no triples");
  }

  if (!have_relation_map) {
    // Relations are indexed by ascending original id.
    std::set<std::int64_t> ids;
    for (const auto& t : raw) ids.insert(t.relation);
    for (const auto id : ids) {
      relations.index.emplace(id, static_cast<EntityId>(relations.labels.size()));
      relations.labels.push_back(std::to_string(id));
    }
  }
  out.graph.relation_count = relations.labels.size();
  out.graph.relation_labels = relations.labels;
  out.graph.triples.reserve(raw.size());
  for (const auto& t : raw) {
    out.graph.triples.push_back({t.head, relations.index.at(t.relation), t.tail});
  }
  return out;
}

std::vector<std::pair<EntityId, EntityId>> read_links(const fs::path& path,
                                                      const IdMap& first,
                                                      const IdMap& second) {
  std::vector<std::pair<EntityId, EntityId>> out;
  TsvReader reader(path);
  while (reader.next()) {
    reader.expect_columns(2);
    out.emplace_back(lookup(first, reader.integer(0), reader, "alignment"),
                     lookup(second, reader.integer(1), reader, "alignment"));
  }
  return out;
}

void append_pairs(AlignmentSet& set, const std::vector<std::pair<EntityId, EntityId>>& links,
                  SplitRole role) {
  for (const auto& [l, r] : links) set.pairs.push_back({l, r, role});
}

struct TripleLinks {
  std::vector<std::pair<EntityId, EntityId>> heads;
  std::vector<std::pair<EntityId, EntityId>> tails;
};

TripleLinks read_triple_links(const fs::path& path, const IdMap& left, const IdMap& right) {
  TripleLinks out;
  TsvReader reader(path);
  while (reader.next()) {
    reader.expect_columns(6);
    const EntityId h1 = lookup(left, reader.integer(0), reader, "left head");
    reader.integer(1);
    const EntityId t1 = lookup(left, reader.integer(2), reader, "left tail");
    const EntityId h2 = lookup(right, reader.integer(3), reader, "right head");
    reader.integer(4);
    const EntityId t2 = lookup(right, reader.integer(5), reader, "right tail");
    out.heads.emplace_back(h1, h2);
    out.tails.emplace_back(t1, t2);
  }
  return out;
}

Wk3lAlignmentSources read_wk3l_sources(const fs::path& links_lr, const fs::path& links_rl,
                                       const fs::path& triple_links, const IdMap& left,
                                       const IdMap& right) {
  Wk3lAlignmentSources sources;
  sources.left_to_right = read_links(links_lr, left, right);
  for (const auto& [r, l] : read_links(links_rl, right, left)) {
    sources.right_to_left.emplace_back(l, r);
  }
  TripleLinks tl = read_triple_links(triple_links, left, right);
  sources.triple_heads = std::move(tl.heads);
  sources.triple_tails = std::move(tl.tails);
  return sources;
}

IdMap identity_map(const KnowledgeGraph& g) {
  IdMap m;
  for (std::size_t i = 0; i < g.entity_count; ++i) {
    m.index.emplace(static_cast<std::int64_t>(i), static_cast<EntityId>(i));
    m.labels.push_back(g.entity_label(static_cast<EntityId>(i)));
  }
  return m;
}

std::optional<fs::path> optional_file(const DatasetDescriptor& desc,
                                     std::string_view role) {
  for (const auto& f : dataset_layout(desc.family)) {
    if (f.role == role) return desc.root / f.path;
  }
  return std::nullopt;
}

fs::path file_for(const DatasetDescriptor& desc, std::string_view role) {
  if (auto path = optional_file(desc, role)) return *path;
  fail(ErrorCategory::kDataset, "no file with role " + std::string(role));
}

}  // namespace

AlignmentSet symmetrize_wk3l(const Wk3lAlignmentSources& sources,
                             const KnowledgeGraph& left, const KnowledgeGraph& right) {
  // pair -> bitmask of the sources that contain it
  std::map<std::pair<EntityId, EntityId>, unsigned> support;
  const std::array<const std::vector<std::pair<EntityId, EntityId>>*, 4> lists = {
      &sources.left_to_right, &sources.right_to_left, &sources.triple_heads,
      &sources.triple_tails};
  for (unsigned s = 0; s < lists.size(); ++s) {
    for (const auto& p : *lists[s]) support[p] |= 1u << s;
  }

  struct Candidate {
    int n_sources;
    std::string left_label;
    std::string right_label;
    std::pair<EntityId, EntityId> pair;
  };
  std::vector<Candidate> candidates;
  candidates.reserve(support.size());
  for (const auto& [p, mask] : support) {
    candidates.push_back({std::popcount(mask), left.entity_label(p.first),
                          right.entity_label(p.second), p});
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    return std::tie(b.n_sources, a.left_label, a.right_label, a.pair) <
           std::tie(a.n_sources, b.left_label, b.right_label, b.pair);
  });

  std::vector<char> used_left(left.entity_count, 0);
  std::vector<char> used_right(right.entity_count, 0);
  AlignmentSet out;
  for (const auto& c : candidates) {
    const auto [l, r] = c.pair;
    if (used_left.at(l) || used_right.at(r)) continue;
    used_left[l] = used_right[r] = 1;
    out.pairs.push_back({l, r, SplitRole::kTrain});
  }
  std::sort(out.pairs.begin(), out.pairs.end(), [](const auto& a, const auto& b) {
    return std::tie(a.left, a.right) < std::tie(b.left, b.right);
  });
  return out;
}

AlignmentSet symmetrize_wk3l(const fs::path& links_left_to_right,
                             const fs::path& links_right_to_left,
                             const fs::path& triple_links, const KnowledgeGraph& left,
                             const KnowledgeGraph& right) {
  const IdMap lm = identity_map(left);
  const IdMap rm = identity_map(right);
  return symmetrize_wk3l(
      read_wk3l_sources(links_left_to_right, links_right_to_left, triple_links, lm, rm),
      left, right);
}

void verify_manifest(const DatasetDescriptor& desc) {
  const fs::path manifest = desc.root / kManifestFile;
  if (!fs::exists(manifest)) return;
  std::map<std::string, std::string> pinned;
  TsvReader reader(manifest);
  while (reader.next()) {
    reader.expect_columns(2);
    pinned[std::string(reader.fields()[0])] = std::string(reader.fields()[1]);
  }
  for (const auto& f : dataset_layout(desc.family)) {
    const fs::path path = desc.root / f.path;
    if (!fs::exists(path)) continue;
    const auto it = pinned.find(f.path);
    if (it == pinned.end()) {
      fail(ErrorCategory::kDataset, manifest.string() + ": file " + f.path +
                                        " is present but not pinned in the manifest");
    }
    const std::string digest = sha256_file(path);
    if (digest != it->second) {
      fail(ErrorCategory::kDataset, manifest.string() + ": checksum mismatch for " +
                                        f.path + " (expected " + it->second +
                                        ", found " + digest + ")");
    }
  }
}

void write_manifest(const DatasetDescriptor& desc) {
  std::ofstream out(desc.root / kManifestFile);
  if (!out) fail(ErrorCategory::kIo, "cannot write manifest in " + desc.root.string());
  for (const auto& f : dataset_layout(desc.family)) {
    const fs::path path = desc.root / f.path;
    if (fs::exists(path)) out << f.path << '\t' << sha256_file(path) << '\n';
  }
}

GraphPair load(const DatasetDescriptor& desc) {
  desc.validate();
  if (!fs::is_directory(desc.root)) {
    fail(ErrorCategory::kIo, "dataset directory not found: " + desc.root.string());
  }
  for (const auto& f : dataset_layout(desc.family)) {
    if (f.required && !fs::exists(desc.root / f.path)) {
      fail(ErrorCategory::kIo, "missing dataset file " + (desc.root / f.path).string());
    }
  }
  verify_manifest(desc);

  LoadedGraph left = load_graph(file_for(desc, "entities_left"),
                                file_for(desc, "relations_left"),
                                file_for(desc, "triples_left"));
  LoadedGraph right = load_graph(file_for(desc, "entities_right"),
                                 file_for(desc, "relations_right"),
                                 file_for(desc, "triples_right"));

  GraphPair pair;
  switch (desc.family) {
    case DatasetFamily::kWk3l15k:
    case DatasetFamily::kWk3l120k: {
      const auto sources = read_wk3l_sources(
          file_for(desc, "links_left_to_right"), file_for(desc, "links_right_to_left"),
          file_for(desc, "triple_links"), left.entities, right.entities);
      pair.alignment = symmetrize_wk3l(sources, left.graph, right.graph);
      pair.directed_alignment_counts = {sources.left_to_right.size(),
                                        sources.right_to_left.size()};
      break;
    }
    default: {
      const auto train = optional_file(desc, "train_alignment");
      const auto test = optional_file(desc, "test_alignment");
      if (train && test && fs::exists(*train) && fs::exists(*test)) {
        append_pairs(pair.alignment, read_links(*train, left.entities, right.entities),
                     SplitRole::kTrain);
        append_pairs(pair.alignment, read_links(*test, left.entities, right.entities),
                     SplitRole::kTest);
      } else {
        const auto all = optional_file(desc, "alignment");
        if (!all || !fs::exists(*all)) {
          fail(ErrorCategory::kIo, "missing alignment files in " + desc.root.string());
        }
        append_pairs(pair.alignment, read_links(*all, left.entities, right.entities),
                     SplitRole::kTrain);
      }
      break;
    }
  }

  const fs::path attrs_left = file_for(desc, "attributes_left");
  const fs::path attrs_right = file_for(desc, "attributes_right");
  if (fs::exists(attrs_left) && fs::exists(attrs_right)) {
    pair.attributes_left = load_attribute_table(attrs_left, left.entities);
    pair.attributes_right = load_attribute_table(attrs_right, right.entities);
  }
  pair.left = std::move(left.graph);
  pair.right = std::move(right.graph);

  const auto violations = validate_pair(pair);
  if (!violations.empty()) {
    fail(ErrorCategory::kDataset,
         desc.to_string() + ": " + std::to_string(violations.size()) +
             " invariant violations, first: " + violations.front());
  }
  return pair;
}

AlignmentSet split(const AlignmentSet& alignment, double train_fraction,
                   double val_fraction_of_train, std::uint64_t seed) {
  auto in_open_unit = [](double f) { return f > 0.0 && f < 1.0; };
  if (!in_open_unit(train_fraction) || !in_open_unit(val_fraction_of_train)) {
    fail(ErrorCategory::kConfig, "split: fractions must lie in the open interval (0, 1)");
  }
  if (alignment.pairs.empty()) {
    fail(ErrorCategory::kInvalidArgument, "split: empty alignment");
  }

  std::mt19937_64 rng(seed);
  AlignmentSet out = alignment;
  const bool official_test = alignment.count(SplitRole::kTest) > 0;

  std::vector<std::size_t> pool;
  for (std::size_t i = 0; i < out.pairs.size(); ++i) {
    if (official_test) {
      if (out.pairs[i].role != SplitRole::kTest) pool.push_back(i);
    } else {
      pool.push_back(i);
    }
  }
  std::shuffle(pool.begin(), pool.end(), rng);

  std::size_t n_train = pool.size();
  if (!official_test) {
    n_train = static_cast<std::size_t>(
        std::llround(train_fraction * static_cast<double>(pool.size())));
    for (std::size_t k = n_train; k < pool.size(); ++k) {
      out.pairs[pool[k]].role = SplitRole::kTest;
    }
  }
  const auto n_val = static_cast<std::size_t>(
      std::llround(val_fraction_of_train * static_cast<double>(n_train)));
  for (std::size_t k = 0; k < n_train; ++k) {
    out.pairs[pool[k]].role = k < n_val ? SplitRole::kValidation : SplitRole::kTrain;
  }
  return out;
}

GraphPair make_isomorphic_cycles(std::size_t n_nodes) {
  if (n_nodes < 3) {
    fail(ErrorCategory::kInvalidArgument, "make_isomorphic_cycles: need at least 3 nodes");
  }
  std::size_t multiplier = 3;
  while (std::gcd(multiplier, n_nodes) != 1) multiplier += 2;
  auto relabel = [&](std::size_t i) {
    return static_cast<EntityId>((multiplier * i + 1) % n_nodes);
  };

  GraphPair pair;
  for (KnowledgeGraph* g : {&pair.left, &pair.right}) {
    g->entity_count = n_nodes;
    g->relation_count = 1;
  }
  for (std::size_t i = 0; i < n_nodes; ++i) {
    const std::size_t j = (i + 1) % n_nodes;
    pair.left.triples.push_back({static_cast<EntityId>(i), 0, static_cast<EntityId>(j)});
    pair.right.triples.push_back({relabel(i), 0, relabel(j)});
    pair.alignment.pairs.push_back({static_cast<EntityId>(i), relabel(i),
                                    i % 2 == 0 ? SplitRole::kTrain : SplitRole::kTest});
  }
  return pair;
}

void write_generic_dataset(const GraphPair& pair, const fs::path& dir) {
  fs::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream out(dir / name);
    if (!out) fail(ErrorCategory::kIo, "cannot write " + (dir / name).string());
    return out;
  };
  auto write_graph = [&](const KnowledgeGraph& g, const char* ents, const char* rels,
                         const char* triples) {
    auto e = open(ents);
    for (std::size_t i = 0; i < g.entity_count; ++i) {
      e << i << '\t' << g.entity_label(static_cast<EntityId>(i)) << '\n';
    }
    auto r = open(rels);
    for (std::size_t i = 0; i < g.relation_count; ++i) {
      r << i << '\t'
        << (i < g.relation_labels.size() ? g.relation_labels[i] : std::to_string(i))
        << '\n';
    }
    auto t = open(triples);
    for (const auto& tr : g.triples) {
      t << tr.head << '\t' << tr.relation << '\t' << tr.tail << '\n';
    }
  };
  write_graph(pair.left, "ent_ids_1", "rel_ids_1", "triples_1");
  write_graph(pair.right, "ent_ids_2", "rel_ids_2", "triples_2");

  const bool has_test = pair.alignment.count(SplitRole::kTest) > 0;
  if (has_test) {
    auto sup = open("sup_ent_ids");
    auto ref = open("ref_ent_ids");
    for (const auto& p : pair.alignment.pairs) {
      (p.role == SplitRole::kTest ? ref : sup) << p.left << '\t' << p.right << '\n';
    }
  } else {
    auto all = open("ent_links");
    for (const auto& p : pair.alignment.pairs) all << p.left << '\t' << p.right << '\n';
  }
}

AttributeTable load_attribute_table(const fs::path& path, const IdMap& entities,
                                    std::size_t max_features) {
  std::vector<std::pair<EntityId, std::string>> rows;
  std::map<std::string, std::size_t> frequency;
  TsvReader reader(path);
  while (reader.next()) {
    reader.expect_columns(2);
    const EntityId e = lookup(entities, reader.integer(0), reader, "attribute entity");
    std::string predicate(reader.fields()[1]);
    ++frequency[predicate];
    rows.emplace_back(e, std::move(predicate));
  }

  std::vector<std::pair<std::string, std::size_t>> ranked(frequency.begin(), frequency.end());
  // map iteration is already lexicographic, so a stable sort keeps ties ordered
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  if (ranked.size() > max_features) ranked.resize(max_features);

  AttributeTable table;
  table.entity_count = entities.labels.size();
  table.dim = ranked.size();
  table.values.assign(table.entity_count * table.dim, 0.0);
  std::map<std::string, std::size_t> column;
  for (std::size_t c = 0; c < ranked.size(); ++c) {
    column[ranked[c].first] = c;
    table.feature_labels.push_back(ranked[c].first);
  }
  for (const auto& [e, predicate] : rows) {
    const auto it = column.find(predicate);
    if (it != column.end()) table.values[e * table.dim + it->second] = 1.0;
  }
  return table;
}

}  // namespace gcnalign

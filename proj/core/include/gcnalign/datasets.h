#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "gcnalign/graph.h"

namespace gcnalign {

enum class DatasetFamily {
  kDbp15kFull,
  kDbp15kJape,
  kWk3l15k,
  kWk3l120k,
  kDwy100k,
  // Same on-disk layout as DBP15k (JAPE), any subset name; used for custom
  // and synthetic data.
  kGeneric,
};

std::string_view to_string(DatasetFamily family);
std::optional<DatasetFamily> parse_family(std::string_view name);

struct DatasetDescriptor {
  DatasetFamily family = DatasetFamily::kGeneric;
  std::string subset;
  std::filesystem::path root;

  // Throws kConfig unless (family, subset) is a known benchmark combination.
  void validate() const;
  // "family:subset:path"
  static DatasetDescriptor parse(std::string_view text);
  std::string to_string() const;
};

struct GraphStatistics {
  std::size_t triples = 0;
  std::size_t entities = 0;
  std::size_t relations = 0;
  std::optional<std::size_t> directed_alignments;

  friend bool operator==(const GraphStatistics&, const GraphStatistics&) = default;
};

struct DatasetStatistics {
  GraphStatistics left;
  GraphStatistics right;
  std::size_t alignments = 0;
  std::optional<std::size_t> symmetrized_alignments;

  friend bool operator==(const DatasetStatistics&, const DatasetStatistics&) = default;
};

DatasetStatistics statistics(const GraphPair& pair);

// Published sizes of the benchmark datasets, or nullopt for kGeneric /
// unknown subsets.
std::optional<DatasetStatistics> reference_statistics(DatasetFamily family,
                                                      std::string_view subset);

// Exact agreement, except that a symmetrized alignment count only needs to
// be within 1% of the reference (the conflict rule may differ).
bool matches_reference(const DatasetStatistics& actual, const DatasetStatistics& reference);

// Files a family is expected to ship, relative to the descriptor root.
struct DatasetFile {
  std::string role;
  std::string path;
  bool required = true;
};
std::vector<DatasetFile> dataset_layout(DatasetFamily family);

// Optional "MANIFEST" file in the dataset root: "relative_path<TAB>sha256"
// per line. When present, every layout file that exists must be listed with
// a matching digest.
inline constexpr const char* kManifestFile = "MANIFEST";
void verify_manifest(const DatasetDescriptor& desc);
void write_manifest(const DatasetDescriptor& desc);

GraphPair load(const DatasetDescriptor& desc);

// Inputs of the WK3l alignment symmetrization, already mapped to dense
// indices and oriented as (left, right).
struct Wk3lAlignmentSources {
  std::vector<std::pair<EntityId, EntityId>> left_to_right;
  std::vector<std::pair<EntityId, EntityId>> right_to_left;
  std::vector<std::pair<EntityId, EntityId>> triple_heads;
  std::vector<std::pair<EntityId, EntityId>> triple_tails;
};

// Union of all sources; a one-to-one matching is recovered greedily by
// preferring pairs supported by more sources, then by label order.
AlignmentSet symmetrize_wk3l(const Wk3lAlignmentSources& sources,
                             const KnowledgeGraph& left, const KnowledgeGraph& right);

// Reads the three WK3l alignment files (see dataset_layout) and symmetrizes.
AlignmentSet symmetrize_wk3l(const std::filesystem::path& links_left_to_right,
                             const std::filesystem::path& links_right_to_left,
                             const std::filesystem::path& triple_links,
                             const KnowledgeGraph& left, const KnowledgeGraph& right);

// If any pair is already marked test, only the train pairs are re-split into
// train/validation by val_fraction_of_train. Otherwise everything is first
// split train_fraction / (1 - train_fraction) into train/test.
AlignmentSet split(const AlignmentSet& alignment, double train_fraction,
                   double val_fraction_of_train, std::uint64_t seed);

// Two isomorphic directed n-cycles; the right graph is relabeled by
// i -> (3 i + 1) mod n. Every second node is a training pair, the others test.
GraphPair make_isomorphic_cycles(std::size_t n_nodes);

// Writes a pair in the kGeneric layout (train and validation pairs go to the
// training file).
void write_generic_dataset(const GraphPair& pair, const std::filesystem::path& dir);

// Original integer id -> dense index, with labels in dense order.
struct IdMap {
  std::unordered_map<std::int64_t, EntityId> index;
  std::vector<std::string> labels;
};

// Reads "integer_id<TAB>label" lines; dense indices follow file order.
IdMap read_id_map(const std::filesystem::path& path);

// Multi-hot features over the `max_features` most frequent predicates (ties
// lexicographic) from "entity_id<TAB>predicate" lines.
AttributeTable load_attribute_table(const std::filesystem::path& path,
                                    const IdMap& entities,
                                    std::size_t max_features = 1000);

}  // namespace gcnalign

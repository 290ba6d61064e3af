#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace gcnalign {

using EntityId = std::int32_t;
using RelationId = std::int32_t;

struct Triple {
  EntityId head = 0;
  RelationId relation = 0;
  EntityId tail = 0;

  friend bool operator==(const Triple&, const Triple&) = default;
};

// One side of the matching problem. Entities and relations are densely
// indexed; original identifiers survive only as labels.
struct KnowledgeGraph {
  std::size_t entity_count = 0;
  std::size_t relation_count = 0;
  // Duplicates are kept, load order is preserved.
  std::vector<Triple> triples;
  // Either empty or exactly entity_count / relation_count long.
  std::vector<std::string> entity_labels;
  std::vector<std::string> relation_labels;

  // Label of an entity, falling back to its decimal index.
  std::string entity_label(EntityId e) const;
};

enum class SplitRole : std::uint8_t { kTrain, kValidation, kTest };

std::string_view to_string(SplitRole role);

struct AlignedPair {
  EntityId left = 0;
  EntityId right = 0;
  SplitRole role = SplitRole::kTrain;

  friend bool operator==(const AlignedPair&, const AlignedPair&) = default;
};

struct AlignmentSet {
  std::vector<AlignedPair> pairs;

  std::vector<AlignedPair> with_role(SplitRole role) const;
  std::size_t count(SplitRole role) const;
};

// Row-major entity_count x dim feature matrix (multi-hot attributes).
struct AttributeTable {
  std::size_t entity_count = 0;
  std::size_t dim = 0;
  std::vector<double> values;
  std::vector<std::string> feature_labels;
};

struct GraphPair {
  KnowledgeGraph left;
  KnowledgeGraph right;
  AlignmentSet alignment;
  std::optional<AttributeTable> attributes_left;
  std::optional<AttributeTable> attributes_right;
  // Sizes of the two raw directed alignment files (WK3l only).
  std::optional<std::pair<std::size_t, std::size_t>> directed_alignment_counts;
};

// Returns a human-readable message for every broken invariant; empty means
// the pair is well-formed.
std::vector<std::string> validate_pair(const GraphPair& pair);

}  // namespace gcnalign

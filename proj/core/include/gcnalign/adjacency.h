#pragma once

#include <vector>

#include "gcnalign/graph.h"
#include "gcnalign/linalg.h"

namespace gcnalign {

// Per-relation functionality (distinct heads / occurrences) and inverse
// functionality (distinct tails / occurrences).
struct RelationWeights {
  std::vector<double> fun;
  std::vector<double> ifun;
  double clamp_floor = 0.3;

  // Copy with every score raised to at least clamp_floor.
  RelationWeights clamped() const;
};

enum class AdjacencyVariant { kFunctionality, kCount };

struct AdjacencyConfig {
  AdjacencyVariant variant = AdjacencyVariant::kCount;
  bool clamp = true;
  DegreeNormalization normalization = DegreeNormalization::kRow;
  bool add_self_loops = true;
};

// Throws if some relation occurs in no triple.
RelationWeights compute_functionality(const KnowledgeGraph& g);

// A_ij = sum over (e_i, r, e_j) of ifun[r] + sum over (e_j, r, e_i) of fun[r].
SparseMatrix functionality_adjacency(const KnowledgeGraph& g,
                                     const RelationWeights& weights);

// A_ij = number of triples (e_i, r, e_j), symmetrized to A + A^T.
SparseMatrix count_adjacency(const KnowledgeGraph& g);

// Adjacency per cfg with self-loops added, before degree normalization.
SparseMatrix unnormalized_adjacency(const KnowledgeGraph& g,
                                    const AdjacencyConfig& cfg);

// Final propagation matrix: unnormalized_adjacency followed by
// degree_normalize(cfg.normalization).
SparseMatrix build_adjacency(const KnowledgeGraph& g, const AdjacencyConfig& cfg);

}  // namespace gcnalign

#include "gcnalign/adjacency.h"

#include <algorithm>
#include <string>
#include <utility>

#include "gcnalign/error.h"

namespace gcnalign {

RelationWeights RelationWeights::clamped() const {
  RelationWeights out = *this;
  for (double& v : out.fun) v = std::max(v, clamp_floor);
  for (double& v : out.ifun) v = std::max(v, clamp_floor);
  return out;
}

RelationWeights compute_functionality(const KnowledgeGraph& g) {
  const std::size_t m = g.relation_count;
  std::vector<std::size_t> occurrences(m, 0);
  std::vector<std::pair<RelationId, EntityId>> heads;
  std::vector<std::pair<RelationId, EntityId>> tails;
  heads.reserve(g.triples.size());
  tails.reserve(g.triples.size());
  for (const Triple& t : g.triples) {
    ++occurrences[t.relation];
    heads.emplace_back(t.relation, t.head);
    tails.emplace_back(t.relation, t.tail);
  }

  auto distinct_per_relation = [m](std::vector<std::pair<RelationId, EntityId>>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    std::vector<std::size_t> counts(m, 0);
    for (const auto& [r, e] : v) ++counts[r];
    return counts;
  };
  const auto distinct_heads = distinct_per_relation(heads);
  const auto distinct_tails = distinct_per_relation(tails);

  RelationWeights w;
  w.fun.resize(m);
  w.ifun.resize(m);
  for (std::size_t r = 0; r < m; ++r) {
    if (occurrences[r] == 0) {
      fail(ErrorCategory::kDataset,
           "compute_functionality: relation " + std::to_string(r) +
               " occurs in no triple");
    }
    const auto n = static_cast<double>(occurrences[r]);
    w.fun[r] = static_cast<double>(distinct_heads[r]) / n;
    w.ifun[r] = static_cast<double>(distinct_tails[r]) / n;
  }
  return w;
}

namespace {

std::vector<CooEntry> self_loops(std::size_t n) {
  std::vector<CooEntry> entries(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::int64_t>(i);
    entries[i] = {k, k, 1.0};
  }
  return entries;
}

void append_functionality_entries(const KnowledgeGraph& g,
                                  const RelationWeights& w,
                                  std::vector<CooEntry>& entries) {
  if (w.fun.size() != g.relation_count || w.ifun.size() != g.relation_count) {
    fail(ErrorCategory::kInvalidArgument,
         "functionality_adjacency: weight vectors do not match relation_count");
  }
  for (const Triple& t : g.triples) {
    entries.push_back({t.head, t.tail, w.ifun[t.relation]});
    entries.push_back({t.tail, t.head, w.fun[t.relation]});
  }
}

void append_count_entries(const KnowledgeGraph& g, std::vector<CooEntry>& entries) {
  for (const Triple& t : g.triples) {
    entries.push_back({t.head, t.tail, 1.0});
    entries.push_back({t.tail, t.head, 1.0});
  }
}

}  // namespace

SparseMatrix functionality_adjacency(const KnowledgeGraph& g,
                                     const RelationWeights& weights) {
  std::vector<CooEntry> entries;
  entries.reserve(2 * g.triples.size());
  append_functionality_entries(g, weights, entries);
  return SparseMatrix::from_triplets(g.entity_count, g.entity_count, entries);
}

SparseMatrix count_adjacency(const KnowledgeGraph& g) {
  std::vector<CooEntry> entries;
  entries.reserve(2 * g.triples.size());
  append_count_entries(g, entries);
  return SparseMatrix::from_triplets(g.entity_count, g.entity_count, entries);
}

SparseMatrix unnormalized_adjacency(const KnowledgeGraph& g,
                                    const AdjacencyConfig& cfg) {
  std::vector<CooEntry> entries;
  if (cfg.add_self_loops) entries = self_loops(g.entity_count);
  entries.reserve(entries.size() + 2 * g.triples.size());
  if (cfg.variant == AdjacencyVariant::kCount) {
    append_count_entries(g, entries);
  } else {
    RelationWeights w = compute_functionality(g);
    if (cfg.clamp) w = w.clamped();
    append_functionality_entries(g, w, entries);
  }
  return SparseMatrix::from_triplets(g.entity_count, g.entity_count, entries);
}

SparseMatrix build_adjacency(const KnowledgeGraph& g, const AdjacencyConfig& cfg) {
  return degree_normalize(unnormalized_adjacency(g, cfg), cfg.normalization);
}

}  // namespace gcnalign

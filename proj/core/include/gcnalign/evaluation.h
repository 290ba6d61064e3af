#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gcnalign/graph.h"
#include "gcnalign/linalg.h"

namespace gcnalign {

// beta weights the structural distance against the attribute distance.
// Both distances are L1 divided by the respective embedding width.
struct ScoreConfig {
  double beta = 1.0;
};

// Negated, width-normalized L1 distance; higher is better. Attribute rows are
// ignored when beta == 1 and required otherwise.
double score(std::span<const double> s_left, std::span<const double> s_right,
             std::span<const double> a_left, std::span<const double> a_right,
             const ScoreConfig& cfg);

// 1-based position of `truth` after sorting candidates by descending score,
// ties broken by ascending candidate id. scores[i] belongs to candidates[i].
std::size_t rank_of(EntityId truth, std::span<const EntityId> candidates,
                    std::span<const double> scores);

enum class CandidatePolicy { kTestOnly, kAllEntities };

std::string_view to_string(CandidatePolicy policy);

struct DirectionMetrics {
  std::map<int, double> hits_at;  // k -> percentage
  double mean_rank = 0.0;
  double mrr = 0.0;
  std::size_t n_test = 0;
  // Tie diagnostics: mean rank if every tie went for / against the truth.
  double optimistic_mean_rank = 0.0;
  double pessimistic_mean_rank = 0.0;

  friend bool operator==(const DirectionMetrics&, const DirectionMetrics&) = default;
};

struct MetricsReport {
  DirectionMetrics left_to_right;
  DirectionMetrics right_to_left;
  DirectionMetrics mean;  // element-wise average of the two directions
  CandidatePolicy candidate_policy = CandidatePolicy::kTestOnly;
  SplitRole evaluated_role = SplitRole::kTest;

  friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

inline const std::vector<int> kDefaultHitsAt = {1, 10, 50};

// MR, MRR and H@k from a list of 1-based ranks.
DirectionMetrics compute_metrics(std::span<const std::size_t> ranks,
                                 std::span<const int> ks = kDefaultHitsAt);

// Final embeddings of both graphs; attribute embeddings are optional.
struct AlignmentEmbeddings {
  DenseMatrix structure_left;
  DenseMatrix structure_right;
  std::optional<DenseMatrix> attribute_left;
  std::optional<DenseMatrix> attribute_right;
};

struct EvaluateOptions {
  ScoreConfig score;
  CandidatePolicy policy = CandidatePolicy::kTestOnly;
  SplitRole role = SplitRole::kTest;
  std::vector<int> ks = kDefaultHitsAt;
  int n_threads = 1;
};

// Ranks every pair of the given role in both directions.
MetricsReport evaluate(const AlignmentEmbeddings& emb, const AlignmentSet& alignment,
                       const EvaluateOptions& options);

std::string metrics_to_json(const MetricsReport& report);
MetricsReport metrics_from_json(const std::string& text);
// Fixed-width table: one row per direction, percentages with two decimals.
std::string metrics_to_table(const MetricsReport& report);

}  // namespace gcnalign

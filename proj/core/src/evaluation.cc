#include "gcnalign/evaluation.h"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "gcnalign/error.h"

namespace gcnalign {

namespace {

double l1(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) d += std::abs(a[j] - b[j]);
  return d;
}

}  // namespace

double score(std::span<const double> s_left, std::span<const double> s_right,
             std::span<const double> a_left, std::span<const double> a_right,
             const ScoreConfig& cfg) {
  if (!(cfg.beta >= 0.0 && cfg.beta <= 1.0)) {
    fail(ErrorCategory::kConfig, "score: beta must lie in [0, 1]");
  }
  if (s_left.size() != s_right.size() || s_left.empty()) {
    fail(ErrorCategory::kInvalidArgument, "score: structure embedding widths differ");
  }
  const double structural = l1(s_left, s_right) / static_cast<double>(s_left.size());
  if (cfg.beta == 1.0) return -structural;
  if (a_left.empty() || a_left.size() != a_right.size()) {
    fail(ErrorCategory::kConfig,
         "score: beta < 1 requires attribute embeddings of equal width");
  }
  const double attribute = l1(a_left, a_right) / static_cast<double>(a_left.size());
  return -(cfg.beta * structural + (1.0 - cfg.beta) * attribute);
}

namespace {

struct RankCounts {
  std::size_t better = 0;
  std::size_t tied_before = 0;  // ties with a smaller candidate id
  std::size_t tied = 0;         // ties other than the truth itself
};

RankCounts count_ranks(EntityId truth, std::span<const EntityId> candidates,
                       std::span<const double> scores) {
  if (candidates.size() != scores.size()) {
    fail(ErrorCategory::kInvalidArgument, "rank_of: one score per candidate required");
  }
  const auto it = std::find(candidates.begin(), candidates.end(), truth);
  if (it == candidates.end()) {
    fail(ErrorCategory::kInvalidArgument,
         "rank_of: truth " + std::to_string(truth) + " is not a candidate");
  }
  const double truth_score = scores[it - candidates.begin()];
  RankCounts c;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (candidates[i] == truth) continue;
    if (scores[i] > truth_score) {
      ++c.better;
    } else if (scores[i] == truth_score) {
      ++c.tied;
      if (candidates[i] < truth) ++c.tied_before;
    }
  }
  return c;
}

}  // namespace

std::size_t rank_of(EntityId truth, std::span<const EntityId> candidates,
                    std::span<const double> scores) {
  const RankCounts c = count_ranks(truth, candidates, scores);
  return 1 + c.better + c.tied_before;
}

std::string_view to_string(CandidatePolicy policy) {
  return policy == CandidatePolicy::kTestOnly ? "test-only" : "all-entities";
}

DirectionMetrics compute_metrics(std::span<const std::size_t> ranks,
                                 std::span<const int> ks) {
  DirectionMetrics m;
  m.n_test = ranks.size();
  for (int k : ks) m.hits_at[k] = 0.0;
  if (ranks.empty()) return m;
  double sum_rank = 0.0;
  double sum_reciprocal = 0.0;
  for (std::size_t r : ranks) {
    sum_rank += static_cast<double>(r);
    sum_reciprocal += 1.0 / static_cast<double>(r);
  }
  const auto n = static_cast<double>(ranks.size());
  m.mean_rank = sum_rank / n;
  m.mrr = sum_reciprocal / n;
  for (int k : ks) {
    const auto hits = std::count_if(ranks.begin(), ranks.end(), [k](std::size_t r) {
      return r <= static_cast<std::size_t>(k);
    });
    m.hits_at[k] = 100.0 * static_cast<double>(hits) / n;
  }
  m.optimistic_mean_rank = m.mean_rank;
  m.pessimistic_mean_rank = m.mean_rank;
  return m;
}

namespace {

struct DirectionInput {
  const DenseMatrix* query_structure;
  const DenseMatrix* candidate_structure;
  const DenseMatrix* query_attribute;
  const DenseMatrix* candidate_attribute;
};

DirectionMetrics rank_direction(const DirectionInput& in,
                                std::span<const std::pair<EntityId, EntityId>> queries,
                                std::span<const EntityId> candidates,
                                const EvaluateOptions& options) {
  std::vector<std::size_t> ranks(queries.size());
  std::vector<std::size_t> optimistic(queries.size());
  std::vector<std::size_t> pessimistic(queries.size());

  auto work = [&](std::size_t begin, std::size_t end) {
    std::vector<double> scores(candidates.size());
    std::span<const double> none;
    for (std::size_t q = begin; q < end; ++q) {
      const auto [query, truth] = queries[q];
      const auto qs = in.query_structure->row(query);
      const auto qa = in.query_attribute ? in.query_attribute->row(query) : none;
      for (std::size_t c = 0; c < candidates.size(); ++c) {
        const auto cand = candidates[c];
        scores[c] = score(qs, in.candidate_structure->row(cand), qa,
                          in.candidate_attribute ? in.candidate_attribute->row(cand) : none,
                          options.score);
      }
      const RankCounts counts = count_ranks(truth, candidates, scores);
      ranks[q] = 1 + counts.better + counts.tied_before;
      optimistic[q] = 1 + counts.better;
      pessimistic[q] = 1 + counts.better + counts.tied;
    }
  };

  const std::size_t n_threads = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::max(options.n_threads, 1)), 1,
      std::max<std::size_t>(queries.size(), 1));
  if (n_threads == 1) {
    work(0, queries.size());
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (queries.size() + n_threads - 1) / n_threads;
    for (std::size_t t = 0; t < n_threads; ++t) {
      const std::size_t begin = std::min(queries.size(), t * chunk);
      const std::size_t end = std::min(queries.size(), begin + chunk);
      pool.emplace_back(work, begin, end);
    }
    for (auto& th : pool) th.join();
  }

  DirectionMetrics m = compute_metrics(ranks, options.ks);
  double opt_sum = 0.0;
  double pes_sum = 0.0;
  for (std::size_t q = 0; q < queries.size(); ++q) {
    opt_sum += static_cast<double>(optimistic[q]);
    pes_sum += static_cast<double>(pessimistic[q]);
  }
  if (!queries.empty()) {
    m.optimistic_mean_rank = opt_sum / static_cast<double>(queries.size());
    m.pessimistic_mean_rank = pes_sum / static_cast<double>(queries.size());
  }
  return m;
}

std::vector<EntityId> candidate_list(std::span<const AlignedPair> pairs, bool right,
                                     std::size_t n_entities, CandidatePolicy policy) {
  std::vector<EntityId> out;
  if (policy == CandidatePolicy::kAllEntities) {
    out.resize(n_entities);
    for (std::size_t i = 0; i < n_entities; ++i) out[i] = static_cast<EntityId>(i);
    return out;
  }
  for (const auto& p : pairs) out.push_back(right ? p.right : p.left);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

DirectionMetrics average(const DirectionMetrics& a, const DirectionMetrics& b) {
  DirectionMetrics m;
  for (const auto& [k, v] : a.hits_at) m.hits_at[k] = 0.5 * (v + b.hits_at.at(k));
  m.mean_rank = 0.5 * (a.mean_rank + b.mean_rank);
  m.mrr = 0.5 * (a.mrr + b.mrr);
  m.n_test = a.n_test;
  m.optimistic_mean_rank = 0.5 * (a.optimistic_mean_rank + b.optimistic_mean_rank);
  m.pessimistic_mean_rank = 0.5 * (a.pessimistic_mean_rank + b.pessimistic_mean_rank);
  return m;
}

}  // namespace

MetricsReport evaluate(const AlignmentEmbeddings& emb, const AlignmentSet& alignment,
                       const EvaluateOptions& options) {
  const auto pairs = alignment.with_role(options.role);
  if (pairs.empty()) {
    fail(ErrorCategory::kInvalidArgument,
         std::string("evaluate: no alignments with role ") +
             std::string(to_string(options.role)));
  }
  if (options.score.beta < 1.0 && (!emb.attribute_left || !emb.attribute_right)) {
    fail(ErrorCategory::kConfig, "evaluate: beta < 1 requires attribute embeddings");
  }
  const bool use_attr = options.score.beta < 1.0;

  std::vector<std::pair<EntityId, EntityId>> l2r;
  std::vector<std::pair<EntityId, EntityId>> r2l;
  for (const auto& p : pairs) {
    l2r.emplace_back(p.left, p.right);
    r2l.emplace_back(p.right, p.left);
  }
  const auto right_candidates = candidate_list(
      pairs, true, emb.structure_right.rows(), options.policy);
  const auto left_candidates = candidate_list(
      pairs, false, emb.structure_left.rows(), options.policy);

  const DirectionInput forward_in{
      &emb.structure_left, &emb.structure_right,
      use_attr ? &*emb.attribute_left : nullptr,
      use_attr ? &*emb.attribute_right : nullptr};
  const DirectionInput backward_in{
      &emb.structure_right, &emb.structure_left,
      use_attr ? &*emb.attribute_right : nullptr,
      use_attr ? &*emb.attribute_left : nullptr};

  MetricsReport report;
  report.candidate_policy = options.policy;
  report.evaluated_role = options.role;
  report.left_to_right = rank_direction(forward_in, l2r, right_candidates, options);
  report.right_to_left = rank_direction(backward_in, r2l, left_candidates, options);
  report.mean = average(report.left_to_right, report.right_to_left);
  return report;
}

namespace {

nlohmann::json direction_to_json(const DirectionMetrics& m) {
  nlohmann::json hits = nlohmann::json::object();
  for (const auto& [k, v] : m.hits_at) hits[std::to_string(k)] = v;
  return {{"hits_at", hits},
          {"mean_rank", m.mean_rank},
          {"mrr", m.mrr},
          {"n_test", m.n_test},
          {"optimistic_mean_rank", m.optimistic_mean_rank},
          {"pessimistic_mean_rank", m.pessimistic_mean_rank}};
}

DirectionMetrics direction_from_json(const nlohmann::json& j) {
  DirectionMetrics m;
  for (const auto& [k, v] : j.at("hits_at").items()) m.hits_at[std::stoi(k)] = v.get<double>();
  m.mean_rank = j.at("mean_rank").get<double>();
  m.mrr = j.at("mrr").get<double>();
  m.n_test = j.at("n_test").get<std::size_t>();
  m.optimistic_mean_rank = j.at("optimistic_mean_rank").get<double>();
  m.pessimistic_mean_rank = j.at("pessimistic_mean_rank").get<double>();
  return m;
}

}  // namespace

std::string metrics_to_json(const MetricsReport& report) {
  nlohmann::json j = {
      {"candidate_policy", std::string(to_string(report.candidate_policy))},
      {"evaluated_role", std::string(to_string(report.evaluated_role))},
      {"left_to_right", direction_to_json(report.left_to_right)},
      {"right_to_left", direction_to_json(report.right_to_left)},
      {"mean", direction_to_json(report.mean)},
  };
  return j.dump(2);
}

MetricsReport metrics_from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    MetricsReport r;
    const auto policy = j.at("candidate_policy").get<std::string>();
    if (policy == "test-only") {
      r.candidate_policy = CandidatePolicy::kTestOnly;
    } else if (policy == "all-entities") {
      r.candidate_policy = CandidatePolicy::kAllEntities;
    } else {
      fail(ErrorCategory::kIo, "metrics report: unknown candidate_policy " + policy);
    }
    const auto role = j.at("evaluated_role").get<std::string>();
    r.evaluated_role = role == "train"        ? SplitRole::kTrain
                       : role == "validation" ? SplitRole::kValidation
                                              : SplitRole::kTest;
    r.left_to_right = direction_from_json(j.at("left_to_right"));
    r.right_to_left = direction_from_json(j.at("right_to_left"));
    r.mean = direction_from_json(j.at("mean"));
    return r;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCategory::kIo, std::string("metrics report: ") + e.what());
  }
}

std::string metrics_to_table(const MetricsReport& report) {
  std::ostringstream out;
  out << std::fixed;
  out << std::left << std::setw(10) << "direction";
  for (const auto& [k, v] : report.left_to_right.hits_at) {
    out << std::right << std::setw(9) << ("H@" + std::to_string(k));
  }
  out << std::setw(12) << "MR" << std::setw(9) << "MRR" << std::setw(8) << "n"
      << '\n';
  auto row = [&](const char* name, const DirectionMetrics& m) {
    out << std::left << std::setw(10) << name << std::right;
    for (const auto& [k, v] : m.hits_at) out << std::setw(9) << std::setprecision(2) << v;
    out << std::setw(12) << std::setprecision(2) << m.mean_rank << std::setw(9)
        << std::setprecision(4) << m.mrr << std::setw(8) << m.n_test << '\n';
  };
  row("L->R", report.left_to_right);
  row("R->L", report.right_to_left);
  row("mean", report.mean);
  out << "candidates: " << to_string(report.candidate_policy)
      << ", split: " << to_string(report.evaluated_role) << '\n';
  return out.str();
}

}  // namespace gcnalign

#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <vector>

#include "gcnalign/adjacency.h"
#include "gcnalign/encoder.h"
#include "gcnalign/graph.h"

namespace gcnalign {

enum class OptimizerKind { kSgd, kAdam };
// kSum matches the plain hinge sum; kMean divides by (#positives * #negatives).
enum class LossReduction { kSum, kMean };

std::string_view to_string(OptimizerKind kind);
std::string_view to_string(LossReduction reduction);

struct TrainConfig {
  OptimizerKind optimizer = OptimizerKind::kAdam;
  double learning_rate = 1.0;
  int n_negatives = 50;
  int n_epochs = 2000;
  double margin = 3.0;
  LossReduction reduction = LossReduction::kMean;
  std::uint64_t seed = 0;

  void validate() const;
};

struct NegativePair {
  EntityId left = 0;
  EntityId right = 0;
  std::size_t positive = 0;  // index into the positive list

  friend bool operator==(const NegativePair&, const NegativePair&) = default;
};

// k corruptions per positive, positive-major. Each corruption replaces the
// left or the right entity (fair coin) by a different entity of that graph.
std::vector<NegativePair> sample_negatives(std::span<const AlignedPair> positives,
                                           std::size_t n_left, std::size_t n_right,
                                           int k, std::mt19937_64& rng);

struct LossResult {
  double loss = 0.0;
  DenseMatrix grad_left;
  DenseMatrix grad_right;
  std::size_t active_terms = 0;
};

// sum_pos sum_neg [ |s_l - s_r|_1 + margin - |s_l' - s_r'|_1 ]_+ and its
// (sub)gradient w.r.t. both embedding matrices.
LossResult margin_rank_loss(const DenseMatrix& emb_left, const DenseMatrix& emb_right,
                            std::span<const AlignedPair> positives,
                            std::span<const NegativePair> negatives, double margin);

struct OptimizerState {
  std::vector<std::vector<double>> first_moment;
  std::vector<std::vector<double>> second_moment;
  std::int64_t step = 0;
};

// In-place update of every parameter block. Throws kNumeric on a non-finite
// gradient; `epoch` is only used in the message.
void optimizer_step(std::span<const std::span<double>> params,
                    std::span<const std::span<const double>> grads,
                    OptimizerState& state, const TrainConfig& cfg, int epoch = -1);

struct TrainResult {
  EmbeddingState state;
  std::vector<double> loss_trace;  // one entry per epoch, before the step
};

TrainResult train(const SparseMatrix& adj_left, const SparseMatrix& adj_right,
                  std::span<const AlignedPair> positives, EmbeddingState initial,
                  const EncoderConfig& enc_cfg, const TrainConfig& train_cfg);

TrainResult train(const GraphPair& pair, const AdjacencyConfig& adj_cfg,
                  const EncoderConfig& enc_cfg, const TrainConfig& train_cfg);

// "epoch<TAB>loss" lines, epochs counted from 1, with a header row.
void write_loss_trace(std::ostream& out, std::span<const double> trace);
std::vector<double> read_loss_trace(std::istream& in);

}  // namespace gcnalign

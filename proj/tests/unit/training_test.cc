#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "gcnalign/adjacency.h"
#include "gcnalign/datasets.h"
#include "gcnalign/error.h"
#include "gcnalign/training.h"
#include "oracles.h"

namespace gcnalign {
namespace {

std::vector<AlignedPair> diagonal_pairs(int n) {
  std::vector<AlignedPair> out;
  for (int i = 0; i < n; ++i) out.push_back({i, i, SplitRole::kTrain});
  return out;
}

TEST(SampleNegatives, CountIsPositivesTimesK) {
  std::mt19937_64 rng(1);
  const auto pos = diagonal_pairs(10);
  const auto neg = sample_negatives(pos, 20, 30, 5, rng);
  EXPECT_EQ(neg.size(), 50u);
  for (std::size_t i = 0; i < neg.size(); ++i) EXPECT_EQ(neg[i].positive, i / 5);
}

TEST(SampleNegatives, EntitiesStayInTheirGraphAndDiffer) {
  std::mt19937_64 rng(2);
  const auto pos = diagonal_pairs(5);
  for (const auto& n : sample_negatives(pos, 7, 300, 200, rng)) {
    const auto& p = pos[n.positive];
    EXPECT_GE(n.left, 0);
    EXPECT_LT(n.left, 7);
    EXPECT_LT(n.right, 300);
    // exactly one side is replaced
    EXPECT_NE(n.left != p.left, n.right != p.right);
  }
}

TEST(SampleNegatives, SingleEntityGraphThrows) {
  std::mt19937_64 rng(3);
  const auto pos = diagonal_pairs(1);
  EXPECT_THROW(sample_negatives(pos, 1, 5, 2, rng), Error);
}

TEST(SampleNegatives, ReplacementsAreUniform) {
  // Left corruptions of positive (0, 0) over 100 entities: the 99 others
  // should be equally likely. Chi-square with 98 dof.
  std::mt19937_64 rng(4);
  const std::vector<AlignedPair> pos = {{0, 0, SplitRole::kTrain}};
  std::vector<double> counts(100, 0.0);
  std::size_t n_left = 0, total = 0;
  const auto neg = sample_negatives(pos, 100, 100, 100000, rng);
  for (const auto& n : neg) {
    ++total;
    if (n.left != 0) {
      ++n_left;
      counts[n.left] += 1.0;
    }
  }
  EXPECT_EQ(counts[0], 0.0);
  // fair coin between sides, within 4 sigma
  EXPECT_NEAR(double(n_left) / double(total), 0.5, 4 * 0.5 / std::sqrt(double(total)));
  const double expected = double(n_left) / 99.0;
  double chi2 = 0.0;
  for (int e = 1; e < 100; ++e) chi2 += (counts[e] - expected) * (counts[e] - expected) / expected;
  // 98 dof: mean 98, sd 14; 3 sigma bound
  EXPECT_LT(chi2, 98 + 3 * 14);
  for (int e = 1; e < 100; ++e) EXPECT_NEAR(counts[e], expected, 4 * std::sqrt(expected));
}

TEST(MarginRankLoss, SingleTermExample) {
  // pos distance 1.0, neg distance 2.5
  const DenseMatrix left(2, 1, {0.0, 0.0});
  const DenseMatrix right(2, 1, {1.0, 2.5});
  const std::vector<AlignedPair> pos = {{0, 0}};
  const std::vector<NegativePair> neg = {{1, 1, 0}};
  const auto r = margin_rank_loss(left, right, pos, neg, 3.0);
  EXPECT_DOUBLE_EQ(r.loss, 1.5);
  EXPECT_EQ(r.active_terms, 1u);
  EXPECT_EQ(r.grad_left(0, 0), -1.0);
  EXPECT_EQ(r.grad_right(0, 0), 1.0);
  EXPECT_EQ(r.grad_left(1, 0), 1.0);
  EXPECT_EQ(r.grad_right(1, 0), -1.0);
}

TEST(MarginRankLoss, InactiveHingeHasNoGradient) {
  const DenseMatrix left(2, 1, {0.0, 0.0});
  const DenseMatrix right(2, 1, {1.0, 4.0});  // neg = pos + margin exactly
  const std::vector<AlignedPair> pos = {{0, 0}};
  const std::vector<NegativePair> neg = {{1, 1, 0}};
  const auto r = margin_rank_loss(left, right, pos, neg, 3.0);
  EXPECT_EQ(r.loss, 0.0);
  EXPECT_EQ(r.active_terms, 0u);
  for (double v : r.grad_left.values()) EXPECT_EQ(v, 0.0);
  for (double v : r.grad_right.values()) EXPECT_EQ(v, 0.0);
}

TEST(MarginRankLoss, MatchesScalarReference) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const DenseMatrix l = testing::random_dense(5, 3, rng);
    const DenseMatrix r = testing::random_dense(5, 3, rng);
    const std::vector<AlignedPair> pos = {{0, 1}, {2, 3}};
    const auto neg = sample_negatives(pos, 5, 5, 2, rng);
    const auto got = margin_rank_loss(l, r, pos, neg, 1.0);
    EXPECT_NEAR(got.loss, testing::reference_loss(l, r, pos, neg, 1.0), 1e-12);
    EXPECT_GE(got.loss, 0.0);
  }
}

TEST(MarginRankLoss, ZeroLossMeansNegativesAreFarEnough) {
  std::mt19937_64 rng(6);
  const DenseMatrix l = testing::random_dense(6, 2, rng, -10, 10);
  const DenseMatrix r = l;
  const auto pos = diagonal_pairs(6);
  const auto neg = sample_negatives(pos, 6, 6, 4, rng);
  const auto res = margin_rank_loss(l, r, pos, neg, 0.5);
  if (res.loss == 0.0) {
    for (const auto& n : neg) {
      double d = 0.0;
      for (int c = 0; c < 2; ++c) d += std::abs(l(n.left, c) - r(n.right, c));
      EXPECT_GE(d, 0.5);
    }
  }
}

TEST(OptimizerStep, SgdOneStep) {
  std::vector<double> theta = {1.0};
  const std::vector<double> g = {0.5};
  std::vector<std::span<double>> params = {theta};
  std::vector<std::span<const double>> grads = {g};
  OptimizerState state;
  TrainConfig cfg;
  cfg.optimizer = OptimizerKind::kSgd;
  cfg.learning_rate = 0.1;
  optimizer_step(params, grads, state, cfg);
  EXPECT_DOUBLE_EQ(theta[0], 0.95);
}

TEST(OptimizerStep, AdamFirstStepIsSignedLearningRate) {
  std::vector<double> theta = {0.0};
  const std::vector<double> g = {0.5};
  std::vector<std::span<double>> params = {theta};
  std::vector<std::span<const double>> grads = {g};
  OptimizerState state;
  TrainConfig cfg;
  cfg.optimizer = OptimizerKind::kAdam;
  cfg.learning_rate = 0.1;
  optimizer_step(params, grads, state, cfg);
  // m_hat = g, v_hat = g^2: step = lr * g / (|g| + eps)
  EXPECT_NEAR(theta[0], -0.1 * 0.5 / (0.5 + 1e-8), 1e-15);
  EXPECT_EQ(state.step, 1);
}

TEST(OptimizerStep, ZeroGradientIsNoOp) {
  for (auto kind : {OptimizerKind::kSgd, OptimizerKind::kAdam}) {
    std::vector<double> theta = {1.5, -2.0};
    const std::vector<double> g = {0.0, 0.0};
    std::vector<std::span<double>> params = {theta};
    std::vector<std::span<const double>> grads = {g};
    OptimizerState state;
    TrainConfig cfg;
    cfg.optimizer = kind;
    optimizer_step(params, grads, state, cfg);
    EXPECT_EQ(theta[0], 1.5);
    EXPECT_EQ(theta[1], -2.0);
  }
}

TEST(OptimizerStep, NonFiniteGradientNamesEpoch) {
  std::vector<double> theta = {0.0};
  const std::vector<double> g = {std::numeric_limits<double>::quiet_NaN()};
  std::vector<std::span<double>> params = {theta};
  std::vector<std::span<const double>> grads = {g};
  OptimizerState state;
  try {
    optimizer_step(params, grads, state, TrainConfig{}, 17);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.category(), ErrorCategory::kNumeric);
    EXPECT_NE(std::string(e.what()).find("17"), std::string::npos);
  }
}

TEST(TrainConfig, ValidateRejectsBadValues) {
  TrainConfig cfg;
  cfg.learning_rate = 0.0;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = TrainConfig{};
  cfg.n_negatives = 0;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = TrainConfig{};
  cfg.margin = -1.0;
  EXPECT_THROW(cfg.validate(), Error);
}

struct Toy {
  GraphPair pair = make_isomorphic_cycles(4);
  SparseMatrix adj_left = build_adjacency(pair.left, AdjacencyConfig{});
  SparseMatrix adj_right = build_adjacency(pair.right, AdjacencyConfig{});
  std::vector<AlignedPair> positives = pair.alignment.with_role(SplitRole::kTrain);
};

TEST(Train, ZeroEpochsReturnsInitialState) {
  Toy toy;
  EncoderConfig enc;
  enc.dim = 8;
  TrainConfig tc;
  tc.n_epochs = 0;
  const auto initial = init_state(enc, 4, 4);
  const auto r = train(toy.adj_left, toy.adj_right, toy.positives, initial, enc, tc);
  EXPECT_EQ(r.state, initial);
  EXPECT_TRUE(r.loss_trace.empty());
}

TEST(Train, LossDecreasesOnIsomorphicCycles) {
  Toy toy;
  ASSERT_EQ(toy.positives.size(), 2u);
  EncoderConfig enc;
  enc.dim = 8;
  TrainConfig tc;
  tc.n_epochs = 200;
  tc.n_negatives = 3;
  tc.learning_rate = 0.1;
  const auto r = train(toy.adj_left, toy.adj_right, toy.positives, init_state(enc, 4, 4), enc, tc);
  ASSERT_EQ(r.loss_trace.size(), 200u);
  EXPECT_LT(r.loss_trace.back(), r.loss_trace.front());
}

TEST(Train, SameSeedSameTrace) {
  Toy toy;
  EncoderConfig enc;
  enc.dim = 6;
  enc.use_weights = true;
  TrainConfig tc;
  tc.n_epochs = 30;
  tc.seed = 9;
  auto run = [&] {
    return train(toy.adj_left, toy.adj_right, toy.positives, init_state(enc, 4, 4), enc, tc);
  };
  const auto a = run();
  const auto b = run();
  EXPECT_EQ(a.loss_trace, b.loss_trace);
  EXPECT_EQ(a.state, b.state);
}

TEST(Train, GraphPairOverloadTrainsOnTrainRole) {
  const GraphPair pair = make_isomorphic_cycles(6);
  EncoderConfig enc;
  enc.dim = 4;
  TrainConfig tc;
  tc.n_epochs = 5;
  const auto r = train(pair, AdjacencyConfig{}, enc, tc);
  EXPECT_EQ(r.loss_trace.size(), 5u);
  for (double l : r.loss_trace) EXPECT_GE(l, 0.0);
}

TEST(Train, UntouchedDisconnectedEntitiesGetZeroGradient) {
  // Entity 3 of each graph has only its self-loop and appears in no pair.
  KnowledgeGraph g;
  g.entity_count = 4;
  g.relation_count = 1;
  g.triples = {{0, 0, 1}, {1, 0, 2}};
  const auto a = build_adjacency(g, AdjacencyConfig{});
  EncoderConfig enc;
  enc.dim = 3;
  const std::vector<AlignedPair> pos = {{0, 0}};
  const std::vector<NegativePair> neg = {{0, 1, 0}, {2, 0, 0}};
  const auto s = init_state(enc, 4, 4);
  const auto fwd = forward_with_tape(a, a, s, enc);
  const auto loss = margin_rank_loss(fwd.left, fwd.right, pos, neg, 3.0);
  const auto grads = backward(a, a, loss.grad_left, loss.grad_right, fwd.tape, enc);
  for (std::size_t c = 0; c < 3; ++c) {
    EXPECT_EQ(grads.features_left(3, c), 0.0);
    EXPECT_EQ(grads.features_right(3, c), 0.0);
  }
}

TEST(Train, EndToEndGradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(10);
  for (int layers : {1, 2}) {
    EncoderConfig enc;
    enc.dim = 3;
    enc.n_layers = layers;
    const auto g = testing::random_graph(8, 2, 12, rng);
    const auto a = build_adjacency(g, AdjacencyConfig{});
    const auto pos = diagonal_pairs(4);
    const auto neg = sample_negatives(pos, 8, 8, 3, rng);
    const auto check = testing::check_loss_gradient(a, a, init_state(enc, 8, 8), enc, pos, neg, 3.0);
    EXPECT_LT(check.relative_error, 1e-4);
  }
}

TEST(LossTrace, TsvRoundTripIsExact) {
  const std::vector<double> trace = {3.0, 2.718281828459045, 1e-17, 0.1 + 0.2};
  std::stringstream buffer;
  write_loss_trace(buffer, trace);
  EXPECT_EQ(buffer.str().substr(0, 11), "epoch\tloss\n");
  EXPECT_EQ(read_loss_trace(buffer), trace);
}

}  // namespace
}  // namespace gcnalign

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "gcnalign/adjacency.h"
#include "gcnalign/encoder.h"
#include "gcnalign/error.h"
#include "oracles.h"

namespace gcnalign {
namespace {

double sample_std(std::span<const double> v) {
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
  double sq = 0.0;
  for (double x : v) sq += (x - mean) * (x - mean);
  return std::sqrt(sq / double(v.size() - 1));
}

SparseMatrix random_adjacency(std::size_t n, std::mt19937_64& rng) {
  return build_adjacency(testing::random_graph(n, 2, 2 * n, rng), AdjacencyConfig{});
}

TEST(InitState, SameSeedIsBitwiseIdentical) {
  EncoderConfig cfg;
  cfg.dim = 8;
  cfg.use_weights = true;
  cfg.seed = 42;
  EXPECT_EQ(init_state(cfg, 10, 7), init_state(cfg, 10, 7));
  EncoderConfig other = cfg;
  other.seed = 43;
  EXPECT_NE(init_state(cfg, 10, 7).features_left, init_state(other, 10, 7).features_left);
}

TEST(InitState, UnitPresetHasUnitStd) {
  EncoderConfig cfg;
  cfg.dim = 200;
  cfg.init_preset = InitPreset::kUnit;
  const auto s = init_state(cfg, 2500, 2500);
  EXPECT_NEAR(sample_std(s.features_left.values()), 1.0, 0.05);
  EXPECT_NEAR(sample_std(s.features_right.values()), 1.0, 0.05);
}

TEST(InitState, ScaledPresetUsesInverseSqrtDim) {
  EncoderConfig cfg;
  cfg.dim = 100;
  cfg.init_preset = InitPreset::kScaled;
  EXPECT_DOUBLE_EQ(cfg.resolved_init_std(), 0.1);
  const auto s = init_state(cfg, 5000, 5000);
  EXPECT_NEAR(sample_std(s.features_left.values()), 0.1, 0.005);
}

TEST(InitState, GlorotWeightsWithinBound) {
  EncoderConfig cfg;
  cfg.dim = 16;
  cfg.n_layers = 3;
  cfg.use_weights = true;
  const auto s = init_state(cfg, 2, 2);
  ASSERT_EQ(s.weights.size(), 3u);
  const double bound = std::sqrt(6.0 / 32.0);
  for (const auto& w : s.weights) {
    EXPECT_EQ(w.rows(), 16u);
    for (double v : w.values()) EXPECT_LE(std::abs(v), bound);
  }
}

TEST(InitState, WeightlessParameterCount) {
  EncoderConfig cfg;
  cfg.dim = 12;
  const auto s = init_state(cfg, 30, 20);
  EXPECT_TRUE(s.weights.empty());
  EXPECT_EQ(s.parameter_count(), (30u + 20u) * 12u);
  cfg.use_weights = true;
  EXPECT_EQ(init_state(cfg, 30, 20).parameter_count(), 50u * 12u + 2u * 144u);
}

TEST(EncoderConfig, ValidateRejectsBadShapes) {
  EncoderConfig cfg;
  cfg.n_layers = 5;
  EXPECT_THROW(cfg.validate(), Error);
  cfg.n_layers = 4;
  EXPECT_NO_THROW(cfg.validate());
  cfg.dim = 0;
  EXPECT_THROW(cfg.validate(), Error);
}

TEST(Forward, SingleNodeReturnsNormalizedRow) {
  EncoderConfig cfg;
  cfg.dim = 2;
  cfg.n_layers = 1;
  EmbeddingState s{DenseMatrix(1, 2, {3.0, 4.0}), DenseMatrix(1, 2, {0.0, 2.0}), {}};
  const auto i = SparseMatrix::identity(1);
  const auto [l, r] = forward(i, i, s, cfg);
  EXPECT_DOUBLE_EQ(l(0, 0), 0.6);
  EXPECT_DOUBLE_EQ(l(0, 1), 0.8);
  EXPECT_EQ(r, DenseMatrix(1, 2, {0.0, 1.0}));
}

TEST(Forward, FullyMixedPairAveragesNormalizedInputs) {
  EncoderConfig cfg;
  cfg.dim = 2;
  cfg.n_layers = 1;
  const std::vector<CooEntry> ones = {{0, 0, 1}, {0, 1, 1}, {1, 0, 1}, {1, 1, 1}};
  const auto a = degree_normalize(SparseMatrix::from_triplets(2, 2, ones),
                                  DegreeNormalization::kRow);
  EmbeddingState s{DenseMatrix(2, 2, {3, 4, 0, -2}), DenseMatrix(2, 2, {1, 0, 0, 1}), {}};
  const auto [l, r] = forward(a, a, s, cfg);
  for (std::size_t row = 0; row < 2; ++row) {
    EXPECT_DOUBLE_EQ(l(row, 0), 0.3);
    EXPECT_DOUBLE_EQ(l(row, 1), -0.1);
  }
}

TEST(Forward, PureAndDeterministic) {
  std::mt19937_64 rng(5);
  EncoderConfig cfg;
  cfg.dim = 6;
  const auto a = random_adjacency(9, rng);
  const auto s = init_state(cfg, 9, 9);
  EXPECT_EQ(forward(a, a, s, cfg), forward(a, a, s, cfg));
}

TEST(Forward, ShapeMismatchThrows) {
  EncoderConfig cfg;
  cfg.dim = 3;
  const auto s = init_state(cfg, 4, 4);
  EXPECT_THROW(forward(SparseMatrix::identity(5), SparseMatrix::identity(4), s, cfg), Error);
}

TEST(Forward, NonFiniteOutputThrows) {
  EncoderConfig cfg;
  cfg.dim = 2;
  cfg.n_layers = 1;
  cfg.normalize_features = false;
  const double inf = std::numeric_limits<double>::infinity();
  EmbeddingState s{DenseMatrix(1, 2, {inf, 0}), DenseMatrix(1, 2, {1, 0}), {}};
  const auto i = SparseMatrix::identity(1);
  try {
    forward(i, i, s, cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.category(), ErrorCategory::kNumeric);
  }
}

TEST(Forward, HiddenLayersAreNonNegative) {
  std::mt19937_64 rng(6);
  for (bool weights : {false, true}) {
    EncoderConfig cfg;
    cfg.dim = 5;
    cfg.n_layers = 3;
    cfg.use_weights = weights;
    const auto a = random_adjacency(10, rng);
    const auto fwd = forward_with_tape(a, a, init_state(cfg, 10, 10), cfg);
    for (const auto* tape : {&fwd.tape.left, &fwd.tape.right}) {
      for (std::size_t layer = 0; layer + 1 < tape->layer_outputs.size(); ++layer) {
        for (double v : tape->layer_outputs[layer].values()) EXPECT_GE(v, 0.0);
      }
    }
  }
}

TEST(Forward, PermutationEquivariance) {
  std::mt19937_64 rng(7);
  const std::size_t n = 11;
  const KnowledgeGraph g = testing::random_graph(n, 2, 25, rng);
  std::vector<EntityId> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  KnowledgeGraph pg = g;
  for (auto& t : pg.triples) t = {perm[t.head], t.relation, perm[t.tail]};

  for (bool weights : {false, true}) {
    EncoderConfig cfg;
    cfg.dim = 4;
    cfg.n_layers = 2;
    cfg.use_weights = weights;
    EmbeddingState s = init_state(cfg, n, n);
    EmbeddingState ps = s;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t c = 0; c < 4; ++c) ps.features_left(perm[i], c) = s.features_left(i, c);
    }
    const auto a = build_adjacency(g, AdjacencyConfig{});
    const auto pa = build_adjacency(pg, AdjacencyConfig{});
    const auto out = forward(a, a, s, cfg).first;
    const auto pout = forward(pa, a, ps, cfg).first;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t c = 0; c < 4; ++c) EXPECT_NEAR(pout(perm[i], c), out(i, c), 1e-12);
    }
  }
}

TEST(Backward, ZeroUpstreamGivesZeroGradients) {
  std::mt19937_64 rng(8);
  EncoderConfig cfg;
  cfg.dim = 4;
  cfg.use_weights = true;
  const auto a = random_adjacency(6, rng);
  const auto fwd = forward_with_tape(a, a, init_state(cfg, 6, 6), cfg);
  const auto g = backward(a, a, DenseMatrix(6, 4), DenseMatrix(6, 4), fwd.tape, cfg);
  for (double v : testing::flatten(g)) EXPECT_EQ(v, 0.0);
}

TEST(Backward, SingleNodeIsNormalizationJacobian) {
  EncoderConfig cfg;
  cfg.dim = 3;
  cfg.n_layers = 1;
  const DenseMatrix x(1, 3, {1.0, -2.0, 2.0});  // norm 3
  EmbeddingState s{x, x, {}};
  const auto i = SparseMatrix::identity(1);
  const auto fwd = forward_with_tape(i, i, s, cfg);
  const DenseMatrix up(1, 3, {0.5, 1.0, -1.0});
  const auto g = backward(i, i, up, DenseMatrix(1, 3), fwd.tape, cfg);
  // (I/|x| - x x^T/|x|^3) up
  const double norm = 3.0;
  double xu = 0.0;
  for (int c = 0; c < 3; ++c) xu += x(0, c) * up(0, c);
  for (int c = 0; c < 3; ++c) {
    EXPECT_NEAR(g.features_left(0, c), up(0, c) / norm - x(0, c) * xu / (norm * norm * norm),
                1e-15);
  }
}

TEST(Backward, ZeroFeatureRowGetsZeroGradient) {
  EncoderConfig cfg;
  cfg.dim = 2;
  cfg.n_layers = 1;
  EmbeddingState s{DenseMatrix(1, 2), DenseMatrix(1, 2, {1, 1}), {}};
  const auto i = SparseMatrix::identity(1);
  const auto fwd = forward_with_tape(i, i, s, cfg);
  const auto g = backward(i, i, DenseMatrix(1, 2, {1, 1}), DenseMatrix(1, 2), fwd.tape, cfg);
  EXPECT_EQ(g.features_left, DenseMatrix(1, 2));
}

TEST(Backward, TapeConfigMismatchThrows) {
  EncoderConfig cfg;
  cfg.dim = 3;
  const auto i = SparseMatrix::identity(2);
  const auto fwd = forward_with_tape(i, i, init_state(cfg, 2, 2), cfg);
  EncoderConfig other = cfg;
  other.n_layers = 3;
  EXPECT_THROW(backward(i, i, DenseMatrix(2, 3), DenseMatrix(2, 3), fwd.tape, other), Error);
}

// Encoder-only check: loss = <G, forward(x)> for a fixed random G.
double linear_probe(const SparseMatrix& a, const EmbeddingState& s, const EncoderConfig& cfg,
                    const DenseMatrix& gl, const DenseMatrix& gr) {
  const auto [l, r] = forward(a, a, s, cfg);
  double acc = 0.0;
  for (std::size_t i = 0; i < l.size(); ++i) {
    acc += l.values()[i] * gl.values()[i] + r.values()[i] * gr.values()[i];
  }
  return acc;
}

struct FdCase {
  int layers;
  bool weights;
  bool normalize;
};

void PrintTo(const FdCase& c, std::ostream* os) {
  *os << c.layers << " layers, weights " << c.weights << ", normalize " << c.normalize;
}

class EncoderFiniteDifference : public ::testing::TestWithParam<FdCase> {};

TEST_P(EncoderFiniteDifference, MatchesCentralDifferences) {
  const FdCase c = GetParam();
  std::mt19937_64 rng(100 + c.layers * 4 + c.weights * 2 + c.normalize);
  EncoderConfig cfg;
  cfg.dim = 4;
  cfg.n_layers = c.layers;
  cfg.use_weights = c.weights;
  cfg.normalize_features = c.normalize;
  cfg.seed = rng();
  const std::size_t n = 8;
  const auto a = random_adjacency(n, rng);
  EmbeddingState s = init_state(cfg, n, n);
  const DenseMatrix gl = testing::random_dense(n, 4, rng);
  const DenseMatrix gr = testing::random_dense(n, 4, rng);

  const auto fwd = forward_with_tape(a, a, s, cfg);
  const auto analytic = testing::flatten(backward(a, a, gl, gr, fwd.tape, cfg));
  std::vector<double> numeric;
  const double h = 1e-5;
  for (double* p : testing::parameters(s)) {
    const double saved = *p;
    *p = saved + h;
    const double up = linear_probe(a, s, cfg, gl, gr);
    *p = saved - h;
    const double down = linear_probe(a, s, cfg, gl, gr);
    *p = saved;
    numeric.push_back((up - down) / (2 * h));
  }
  EXPECT_LT(testing::relative_error(analytic, numeric), 1e-4);
}

std::vector<FdCase> all_cases() {
  std::vector<FdCase> out;
  for (int layers : {1, 2, 3}) {
    for (bool w : {false, true}) {
      for (bool norm : {false, true}) out.push_back({layers, w, norm});
    }
  }
  return out;
}

INSTANTIATE_TEST_SUITE_P(AllConfigurations, EncoderFiniteDifference,
                         ::testing::ValuesIn(all_cases()),
                         [](const ::testing::TestParamInfo<FdCase>& info) {
                           return std::to_string(info.param.layers) + "layers" +
                                  (info.param.weights ? "_weights" : "_noweights") +
                                  (info.param.normalize ? "_normalized" : "_raw");
                         });

TEST(Backward, SixNodeTwoLayerLossGradient) {
  std::mt19937_64 rng(31);
  for (bool weights : {false, true}) {
    EncoderConfig cfg;
    cfg.dim = 4;
    cfg.n_layers = 2;
    cfg.use_weights = weights;
    const auto a = random_adjacency(6, rng);
    const std::vector<AlignedPair> pos = {{0, 0}, {1, 1}, {2, 2}};
    std::vector<NegativePair> neg;
    for (std::size_t p = 0; p < 3; ++p) {
      neg.push_back({EntityId(p), EntityId((p + 3) % 6), p});
      neg.push_back({EntityId((p + 4) % 6), EntityId(p), p});
    }
    const auto check =
        testing::check_loss_gradient(a, a, init_state(cfg, 6, 6), cfg, pos, neg, 3.0);
    EXPECT_LT(check.relative_error, 1e-4);
  }
}

}  // namespace
}  // namespace gcnalign

#include "gcnalign/training.h"

#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "gcnalign/error.h"

namespace gcnalign {

std::string_view to_string(OptimizerKind kind) {
  return kind == OptimizerKind::kAdam ? "adam" : "sgd";
}

std::string_view to_string(LossReduction reduction) {
  return reduction == LossReduction::kMean ? "mean" : "sum";
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) {
    fail(ErrorCategory::kConfig, "training.learning_rate must be positive");
  }
  if (n_negatives < 1) {
    fail(ErrorCategory::kConfig, "training.n_negatives must be at least 1");
  }
  if (n_epochs < 0) {
    fail(ErrorCategory::kConfig, "training.n_epochs must be non-negative");
  }
  if (!(margin >= 0.0)) {
    fail(ErrorCategory::kConfig, "training.margin must be non-negative");
  }
}

namespace {

EntityId replace_entity(EntityId original, std::size_t n, std::mt19937_64& rng) {
  // Uniform over the n - 1 entities other than the original.
  std::uniform_int_distribution<std::int64_t> pick(0, static_cast<std::int64_t>(n) - 2);
  auto e = pick(rng);
  if (e >= original) ++e;
  return static_cast<EntityId>(e);
}

}  // namespace

std::vector<NegativePair> sample_negatives(std::span<const AlignedPair> positives,
                                           std::size_t n_left, std::size_t n_right,
                                           int k, std::mt19937_64& rng) {
  if (k < 1) {
    fail(ErrorCategory::kInvalidArgument, "sample_negatives: k must be at least 1");
  }
  // Either side may be picked, so both need a replacement candidate.
  if (!positives.empty() && (n_left < 2 || n_right < 2)) {
    fail(ErrorCategory::kInvalidArgument,
         std::string("sample_negatives: ") + (n_left < 2 ? "left" : "right") +
             " graph has fewer than 2 entities");
  }
  std::bernoulli_distribution coin(0.5);
  std::vector<NegativePair> out;
  out.reserve(positives.size() * static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < positives.size(); ++i) {
    const AlignedPair& p = positives[i];
    for (int j = 0; j < k; ++j) {
      NegativePair neg{p.left, p.right, i};
      if (coin(rng)) {
        neg.left = replace_entity(p.left, n_left, rng);
      } else {
        neg.right = replace_entity(p.right, n_right, rng);
      }
      out.push_back(neg);
    }
  }
  return out;
}

namespace {

double l1_distance(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) d += std::abs(a[j] - b[j]);
  return d;
}

// grad_a += scale * sign(a - b), grad_b -= scale * sign(a - b); sign(0) = 0.
void accumulate_l1_grad(std::span<const double> a, std::span<const double> b,
                        std::span<double> grad_a, std::span<double> grad_b,
                        double scale) {
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double diff = a[j] - b[j];
    const double s = diff > 0.0 ? scale : (diff < 0.0 ? -scale : 0.0);
    grad_a[j] += s;
    grad_b[j] -= s;
  }
}

}  // namespace

LossResult margin_rank_loss(const DenseMatrix& emb_left, const DenseMatrix& emb_right,
                            std::span<const AlignedPair> positives,
                            std::span<const NegativePair> negatives, double margin) {
  if (emb_left.cols() != emb_right.cols()) {
    fail(ErrorCategory::kInvalidArgument,
         "margin_rank_loss: embedding widths differ");
  }
  LossResult result{0.0, DenseMatrix(emb_left.rows(), emb_left.cols()),
                    DenseMatrix(emb_right.rows(), emb_right.cols()), 0};

  std::vector<double> pos_dist(positives.size());
  for (std::size_t i = 0; i < positives.size(); ++i) {
    pos_dist[i] = l1_distance(emb_left.row(positives[i].left),
                              emb_right.row(positives[i].right));
  }
  for (const NegativePair& neg : negatives) {
    if (neg.positive >= positives.size()) {
      fail(ErrorCategory::kInvalidArgument,
           "margin_rank_loss: negative refers to unknown positive");
    }
    const AlignedPair& pos = positives[neg.positive];
    const double neg_dist = l1_distance(emb_left.row(neg.left), emb_right.row(neg.right));
    const double term = pos_dist[neg.positive] + margin - neg_dist;
    if (!(term > 0.0)) continue;
    result.loss += term;
    ++result.active_terms;
    accumulate_l1_grad(emb_left.row(pos.left), emb_right.row(pos.right),
                       result.grad_left.row(pos.left), result.grad_right.row(pos.right),
                       1.0);
    accumulate_l1_grad(emb_left.row(neg.left), emb_right.row(neg.right),
                       result.grad_left.row(neg.left), result.grad_right.row(neg.right),
                       -1.0);
  }
  return result;
}

void optimizer_step(std::span<const std::span<double>> params,
                    std::span<const std::span<const double>> grads,
                    OptimizerState& state, const TrainConfig& cfg, int epoch) {
  if (params.size() != grads.size()) {
    fail(ErrorCategory::kInvalidArgument, "optimizer_step: parameter/gradient count mismatch");
  }
  for (std::size_t b = 0; b < params.size(); ++b) {
    if (params[b].size() != grads[b].size()) {
      fail(ErrorCategory::kInvalidArgument,
           "optimizer_step: shape mismatch in block " + std::to_string(b));
    }
    for (double g : grads[b]) {
      if (!std::isfinite(g)) {
        fail(ErrorCategory::kNumeric, "optimizer_step: non-finite gradient in block " +
                                          std::to_string(b) + " at epoch " +
                                          std::to_string(epoch));
      }
    }
  }

  ++state.step;
  const double lr = cfg.learning_rate;
  if (cfg.optimizer == OptimizerKind::kSgd) {
    for (std::size_t b = 0; b < params.size(); ++b) {
      for (std::size_t k = 0; k < params[b].size(); ++k) params[b][k] -= lr * grads[b][k];
    }
    return;
  }

  constexpr double kBeta1 = 0.9;
  constexpr double kBeta2 = 0.999;
  constexpr double kEps = 1e-8;
  if (state.first_moment.size() != params.size()) {
    state.first_moment.assign(params.size(), {});
    state.second_moment.assign(params.size(), {});
  }
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(kBeta1, t);
  const double correction2 = 1.0 - std::pow(kBeta2, t);
  for (std::size_t b = 0; b < params.size(); ++b) {
    auto& m = state.first_moment[b];
    auto& v = state.second_moment[b];
    if (m.size() != params[b].size()) {
      m.assign(params[b].size(), 0.0);
      v.assign(params[b].size(), 0.0);
    }
    for (std::size_t k = 0; k < params[b].size(); ++k) {
      const double g = grads[b][k];
      m[k] = kBeta1 * m[k] + (1.0 - kBeta1) * g;
      v[k] = kBeta2 * v[k] + (1.0 - kBeta2) * g * g;
      const double m_hat = m[k] / correction1;
      const double v_hat = v[k] / correction2;
      params[b][k] -= lr * m_hat / (std::sqrt(v_hat) + kEps);
    }
  }
}

TrainResult train(const SparseMatrix& adj_left, const SparseMatrix& adj_right,
                  std::span<const AlignedPair> positives, EmbeddingState initial,
                  const EncoderConfig& enc_cfg, const TrainConfig& train_cfg) {
  enc_cfg.validate();
  train_cfg.validate();
  if (train_cfg.n_epochs > 0 && positives.empty()) {
    fail(ErrorCategory::kInvalidArgument, "train: no training alignments");
  }

  TrainResult result{std::move(initial), {}};
  result.loss_trace.reserve(train_cfg.n_epochs);
  std::mt19937_64 rng(train_cfg.seed);
  OptimizerState opt_state;
  const double scale =
      train_cfg.reduction == LossReduction::kMean
          ? 1.0 / static_cast<double>(positives.size() * train_cfg.n_negatives)
          : 1.0;

  for (int epoch = 0; epoch < train_cfg.n_epochs; ++epoch) {
    const auto negatives =
        sample_negatives(positives, result.state.features_left.rows(),
                         result.state.features_right.rows(), train_cfg.n_negatives, rng);
    ForwardResult fwd = forward_with_tape(adj_left, adj_right, result.state, enc_cfg);
    LossResult loss =
        margin_rank_loss(fwd.left, fwd.right, positives, negatives, train_cfg.margin);
    if (scale != 1.0) {
      for (double& g : loss.grad_left.values()) g *= scale;
      for (double& g : loss.grad_right.values()) g *= scale;
    }
    result.loss_trace.push_back(loss.loss * scale);

    EncoderGradients grads =
        backward(adj_left, adj_right, loss.grad_left, loss.grad_right, fwd.tape, enc_cfg);

    std::vector<std::span<double>> params{result.state.features_left.values(),
                                          result.state.features_right.values()};
    std::vector<std::span<const double>> grad_views{grads.features_left.values(),
                                                    grads.features_right.values()};
    for (std::size_t i = 0; i < result.state.weights.size(); ++i) {
      params.push_back(result.state.weights[i].values());
      grad_views.push_back(grads.weights[i].values());
    }
    optimizer_step(params, grad_views, opt_state, train_cfg, epoch);
  }
  return result;
}

TrainResult train(const GraphPair& pair, const AdjacencyConfig& adj_cfg,
                  const EncoderConfig& enc_cfg, const TrainConfig& train_cfg) {
  const auto violations = validate_pair(pair);
  if (!violations.empty()) {
    fail(ErrorCategory::kDataset, "train: invalid graph pair: " + violations.front());
  }
  const SparseMatrix adj_left = build_adjacency(pair.left, adj_cfg);
  const SparseMatrix adj_right = build_adjacency(pair.right, adj_cfg);
  const auto positives = pair.alignment.with_role(SplitRole::kTrain);
  return train(adj_left, adj_right, positives,
               init_state(enc_cfg, pair.left.entity_count, pair.right.entity_count),
               enc_cfg, train_cfg);
}

void write_loss_trace(std::ostream& out, std::span<const double> trace) {
  out << "epoch\tloss\n";
  out << std::setprecision(17);
  for (std::size_t i = 0; i < trace.size(); ++i) {
    out << (i + 1) << '\t' << trace[i] << '\n';
  }
}

std::vector<double> read_loss_trace(std::istream& in) {
  std::vector<double> trace;
  std::string line;
  std::getline(in, line);
  if (line != "epoch\tloss") {
    fail(ErrorCategory::kIo, "loss trace: missing 'epoch<TAB>loss' header");
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::size_t epoch = 0;
    double loss = 0.0;
    if (!(fields >> epoch >> loss) || epoch != trace.size() + 1) {
      fail(ErrorCategory::kIo, "loss trace: malformed line '" + line + "'");
    }
    trace.push_back(loss);
  }
  return trace;
}

}  // namespace gcnalign

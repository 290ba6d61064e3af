#include "gcnalign/encoder.h"

#include <cmath>
#include <random>
#include <string>

#include "gcnalign/error.h"

namespace gcnalign {

std::string_view to_string(InitPreset preset) {
  switch (preset) {
    case InitPreset::kUnit:
      return "unit";
    case InitPreset::kScaled:
      return "scaled";
    case InitPreset::kCustom:
      return "custom";
  }
  return "unknown";
}

double EncoderConfig::resolved_init_std() const {
  switch (init_preset) {
    case InitPreset::kUnit:
      return 1.0;
    case InitPreset::kScaled:
      return 1.0 / std::sqrt(static_cast<double>(dim));
    case InitPreset::kCustom:
      return init_std;
  }
  return init_std;
}

void EncoderConfig::validate() const {
  if (dim <= 0) {
    fail(ErrorCategory::kConfig, "encoder.dim must be positive, got " + std::to_string(dim));
  }
  if (n_layers < 1 || n_layers > 4) {
    fail(ErrorCategory::kConfig,
         "encoder.n_layers must be in [1, 4], got " + std::to_string(n_layers));
  }
  if (init_preset == InitPreset::kCustom && !(init_std >= 0.0)) {
    fail(ErrorCategory::kConfig, "encoder.init_std must be non-negative");
  }
}

std::size_t EmbeddingState::parameter_count() const {
  std::size_t n = features_left.size() + features_right.size();
  for (const auto& w : weights) n += w.size();
  return n;
}

namespace {

void draw_weights(const EncoderConfig& cfg, std::mt19937_64& rng,
                  std::vector<DenseMatrix>& weights) {
  weights.clear();
  if (!cfg.use_weights) return;
  const auto d = static_cast<std::size_t>(cfg.dim);
  // Glorot uniform; fan_in = fan_out = dim.
  const double s = std::sqrt(6.0 / static_cast<double>(2 * d));
  std::uniform_real_distribution<double> uniform(-s, s);
  for (int i = 0; i < cfg.n_layers; ++i) {
    DenseMatrix w(d, d);
    for (double& v : w.values()) v = uniform(rng);
    weights.push_back(std::move(w));
  }
}

}  // namespace

EmbeddingState init_state(const EncoderConfig& cfg, std::size_t n_left,
                          std::size_t n_right) {
  cfg.validate();
  const auto d = static_cast<std::size_t>(cfg.dim);
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, cfg.resolved_init_std());
  EmbeddingState state{DenseMatrix(n_left, d), DenseMatrix(n_right, d), {}};
  for (double& v : state.features_left.values()) v = normal(rng);
  for (double& v : state.features_right.values()) v = normal(rng);
  draw_weights(cfg, rng, state.weights);
  return state;
}

EmbeddingState init_state_from_features(const EncoderConfig& cfg,
                                        DenseMatrix left, DenseMatrix right) {
  cfg.validate();
  const auto d = static_cast<std::size_t>(cfg.dim);
  if (left.cols() != d || right.cols() != d) {
    fail(ErrorCategory::kInvalidArgument,
         "init_state_from_features: feature width does not match encoder.dim");
  }
  std::mt19937_64 rng(cfg.seed);
  EmbeddingState state{std::move(left), std::move(right), {}};
  draw_weights(cfg, rng, state.weights);
  return state;
}

namespace {

void check_compatible(const SparseMatrix& adj, const DenseMatrix& features,
                      const EncoderConfig& cfg, const char* side) {
  if (adj.rows() != adj.cols() || adj.rows() != features.rows()) {
    fail(ErrorCategory::kInvalidArgument,
         std::string("forward: ") + side + " adjacency is " +
             std::to_string(adj.rows()) + "x" + std::to_string(adj.cols()) +
             " but there are " + std::to_string(features.rows()) + " feature rows");
  }
  if (features.cols() != static_cast<std::size_t>(cfg.dim)) {
    fail(ErrorCategory::kInvalidArgument,
         std::string("forward: ") + side + " feature width " +
             std::to_string(features.cols()) + " != encoder.dim " +
             std::to_string(cfg.dim));
  }
}

GraphTape forward_graph(const SparseMatrix& adj, const DenseMatrix& features,
                        const std::vector<DenseMatrix>& weights,
                        const EncoderConfig& cfg) {
  GraphTape tape;
  DenseMatrix h = features;
  if (cfg.normalize_features) {
    tape.input_norms.resize(features.rows());
    for (std::size_t r = 0; r < features.rows(); ++r) {
      double sq = 0.0;
      for (double v : features.row(r)) sq += v * v;
      tape.input_norms[r] = std::sqrt(sq);
    }
    h = row_l2_normalize(features);
  }
  for (int layer = 0; layer < cfg.n_layers; ++layer) {
    DenseMatrix p = spmm(adj, h);
    DenseMatrix z = cfg.use_weights ? matmul(p, weights[layer]) : p;
    const bool last = layer + 1 == cfg.n_layers;
    if (!last) {
      for (double& v : z.values()) v = v > 0.0 ? v : 0.0;
    }
    tape.layer_inputs.push_back(std::move(h));
    if (cfg.use_weights) tape.propagated.push_back(std::move(p));
    tape.layer_outputs.push_back(z);
    h = std::move(z);
  }
  if (!h.all_finite()) {
    fail(ErrorCategory::kNumeric, "forward: non-finite embedding values");
  }
  return tape;
}

}  // namespace

ForwardResult forward_with_tape(const SparseMatrix& adj_left,
                                const SparseMatrix& adj_right,
                                const EmbeddingState& state,
                                const EncoderConfig& cfg) {
  cfg.validate();
  check_compatible(adj_left, state.features_left, cfg, "left");
  check_compatible(adj_right, state.features_right, cfg, "right");
  if (cfg.use_weights != !state.weights.empty() ||
      (cfg.use_weights &&
       state.weights.size() != static_cast<std::size_t>(cfg.n_layers))) {
    fail(ErrorCategory::kInvalidArgument,
         "forward: weight list does not match encoder configuration");
  }

  ForwardResult result;
  result.tape.left = forward_graph(adj_left, state.features_left, state.weights, cfg);
  result.tape.right = forward_graph(adj_right, state.features_right, state.weights, cfg);
  result.tape.n_layers = cfg.n_layers;
  result.tape.dim = cfg.dim;
  result.tape.use_weights = cfg.use_weights;
  result.tape.normalize_features = cfg.normalize_features;
  result.tape.weights = state.weights;
  result.left = result.tape.left.layer_outputs.back();
  result.right = result.tape.right.layer_outputs.back();
  return result;
}

std::pair<DenseMatrix, DenseMatrix> forward(const SparseMatrix& adj_left,
                                            const SparseMatrix& adj_right,
                                            const EmbeddingState& state,
                                            const EncoderConfig& cfg) {
  ForwardResult r = forward_with_tape(adj_left, adj_right, state, cfg);
  return {std::move(r.left), std::move(r.right)};
}

namespace {

// Returns the gradient w.r.t. the raw features; accumulates weight gradients.
DenseMatrix backward_graph(const SparseMatrix& adj, DenseMatrix grad,
                           const GraphTape& tape, const ForwardTape& ft,
                           std::vector<DenseMatrix>& weight_grads) {
  for (int layer = ft.n_layers - 1; layer >= 0; --layer) {
    if (layer + 1 < ft.n_layers) {
      // ReLU: the output is positive exactly where the pre-activation was.
      const auto out = tape.layer_outputs[layer].values();
      auto g = grad.values();
      for (std::size_t k = 0; k < g.size(); ++k) {
        if (!(out[k] > 0.0)) g[k] = 0.0;
      }
    }
    if (ft.use_weights) {
      const DenseMatrix dw = matmul_tn(tape.propagated[layer], grad);
      auto acc = weight_grads[layer].values();
      const auto src = dw.values();
      for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += src[k];
      grad = matmul_nt(grad, ft.weights[layer]);
    }
    grad = spmm_transposed(adj, grad);
  }

  if (ft.normalize_features) {
    // d(x/|x|) = (I - u u^T) / |x| with u = x/|x|.
    const DenseMatrix& unit = tape.layer_inputs.front();
    for (std::size_t r = 0; r < grad.rows(); ++r) {
      auto g = grad.row(r);
      const double norm = tape.input_norms[r];
      if (norm == 0.0) {
        std::fill(g.begin(), g.end(), 0.0);
        continue;
      }
      const auto u = unit.row(r);
      double dot = 0.0;
      for (std::size_t j = 0; j < g.size(); ++j) dot += u[j] * g[j];
      for (std::size_t j = 0; j < g.size(); ++j) g[j] = (g[j] - u[j] * dot) / norm;
    }
  }
  return grad;
}

void check_grad_shape(const DenseMatrix& grad, const GraphTape& tape,
                      const char* side) {
  const DenseMatrix& out = tape.layer_outputs.back();
  if (grad.rows() != out.rows() || grad.cols() != out.cols()) {
    fail(ErrorCategory::kInvalidArgument,
         std::string("backward: ") + side + " upstream gradient shape mismatch");
  }
}

}  // namespace

EncoderGradients backward(const SparseMatrix& adj_left,
                          const SparseMatrix& adj_right,
                          const DenseMatrix& grad_out_left,
                          const DenseMatrix& grad_out_right,
                          const ForwardTape& tape, const EncoderConfig& cfg) {
  if (tape.n_layers != cfg.n_layers || tape.dim != cfg.dim ||
      tape.use_weights != cfg.use_weights ||
      tape.normalize_features != cfg.normalize_features ||
      tape.left.layer_outputs.size() != static_cast<std::size_t>(cfg.n_layers)) {
    fail(ErrorCategory::kInvalidArgument,
         "backward: tape was recorded with a different encoder configuration");
  }
  check_grad_shape(grad_out_left, tape.left, "left");
  check_grad_shape(grad_out_right, tape.right, "right");

  EncoderGradients grads;
  if (cfg.use_weights) {
    const auto d = static_cast<std::size_t>(cfg.dim);
    grads.weights.assign(cfg.n_layers, DenseMatrix(d, d));
  }
  grads.features_left =
      backward_graph(adj_left, grad_out_left, tape.left, tape, grads.weights);
  grads.features_right =
      backward_graph(adj_right, grad_out_right, tape.right, tape, grads.weights);
  return grads;
}

}  // namespace gcnalign

#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "gcnalign/linalg.h"

namespace gcnalign {

// How the standard deviation of the initial node embeddings is chosen.
//   kUnit:   std 1
//   kScaled: std dim^-1/2
//   kCustom: EncoderConfig::init_std as given
enum class InitPreset { kUnit, kScaled, kCustom };

std::string_view to_string(InitPreset preset);

struct EncoderConfig {
  int n_layers = 2;
  int dim = 200;
  bool use_weights = false;
  InitPreset init_preset = InitPreset::kUnit;
  double init_std = 1.0;  // only read for kCustom
  bool normalize_features = true;
  std::uint64_t seed = 0;

  double resolved_init_std() const;
  // Throws kConfig on dim <= 0 or n_layers outside [1, 4].
  void validate() const;
};

// Trainable parameters: one feature matrix per graph, and (optionally) one
// dim x dim weight matrix per layer shared by both graphs.
struct EmbeddingState {
  DenseMatrix features_left;
  DenseMatrix features_right;
  std::vector<DenseMatrix> weights;

  std::size_t parameter_count() const;
  friend bool operator==(const EmbeddingState&, const EmbeddingState&) = default;
};

EmbeddingState init_state(const EncoderConfig& cfg, std::size_t n_left,
                          std::size_t n_right);

// Uses the given matrices as initial features (attribute pathway); weights
// are drawn as in init_state. Feature width must equal cfg.dim.
EmbeddingState init_state_from_features(const EncoderConfig& cfg,
                                        DenseMatrix left, DenseMatrix right);

// Intermediate values of one graph's forward pass needed by backward.
struct GraphTape {
  std::vector<double> input_norms;  // row norms of the raw features
  // layer_inputs[i] is H^i (H^0 after normalization); size n_layers.
  std::vector<DenseMatrix> layer_inputs;
  // propagated[i] = A * H^i, kept only when weights are used.
  std::vector<DenseMatrix> propagated;
  // Output of every layer, layer_outputs.back() is the final embedding.
  std::vector<DenseMatrix> layer_outputs;
};

struct ForwardTape {
  GraphTape left;
  GraphTape right;
  int n_layers = 0;
  int dim = 0;
  bool use_weights = false;
  bool normalize_features = false;
  std::vector<DenseMatrix> weights;
};

struct ForwardResult {
  DenseMatrix left;
  DenseMatrix right;
  ForwardTape tape;
};

ForwardResult forward_with_tape(const SparseMatrix& adj_left,
                                const SparseMatrix& adj_right,
                                const EmbeddingState& state,
                                const EncoderConfig& cfg);

std::pair<DenseMatrix, DenseMatrix> forward(const SparseMatrix& adj_left,
                                            const SparseMatrix& adj_right,
                                            const EmbeddingState& state,
                                            const EncoderConfig& cfg);

struct EncoderGradients {
  DenseMatrix features_left;
  DenseMatrix features_right;
  std::vector<DenseMatrix> weights;
};

EncoderGradients backward(const SparseMatrix& adj_left,
                          const SparseMatrix& adj_right,
                          const DenseMatrix& grad_out_left,
                          const DenseMatrix& grad_out_right,
                          const ForwardTape& tape, const EncoderConfig& cfg);

}  // namespace gcnalign

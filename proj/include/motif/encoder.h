#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "motif/types.h"

namespace motif {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

enum class Pooling { Mean, Max };

const char* pooling_name(Pooling p);
Pooling pooling_from_name(const std::string& name);

struct EncoderConfig {
  int n_layers = 6;
  int model_dim = 256;
  int n_heads = 8;
  int ffn_dim = 1024;
  int embed_dim = 128;
  Pooling pooling = Pooling::Mean;
  int steps_per_bar = 16;

  void validate() const;
  bool operator==(const EncoderConfig&) const = default;
};

struct ExpanderConfig {
  std::vector<int> hidden_dims{512, 512};
  int out_dim = 512;

  void validate() const;
  bool operator==(const ExpanderConfig&) const = default;
};

// Weight layout: Dense.weight is (in x out) so activations multiply from the left.
struct Dense {
  Mat weight;
  Mat bias;  // 1 x out
};

struct Norm {
  Mat gain;   // 1 x dim
  Mat shift;  // 1 x dim
};

struct EncoderBlock {
  Norm attn_norm;
  Dense query, key, value, attn_out;
  Norm ffn_norm;
  Dense ffn_in, ffn_out;
};

struct EncoderWeights {
  Dense input;  // 128 pitches -> model_dim
  std::vector<EncoderBlock> blocks;
  Norm final_norm;
  Dense output;  // model_dim -> embed_dim, applied per step before pooling
};

struct ExpanderWeights {
  std::vector<Dense> layers;
};

struct ModelWeights {
  EncoderWeights encoder;
  ExpanderWeights expander;
};

namespace detail {
template <class D, class F>
void visit_dense(D& d, const std::string& prefix, F& f) {
  f(prefix + ".weight", d.weight);
  f(prefix + ".bias", d.bias);
}
template <class N, class F>
void visit_norm(N& n, const std::string& prefix, F& f) {
  f(prefix + ".gain", n.gain);
  f(prefix + ".shift", n.shift);
}
}  // namespace detail

/// Visits every parameter tensor as f(name, matrix) in a fixed order.
/// Encoder Transformer-block parameters are named "encoder.blocks.<i>.*".
template <class W, class F>
void for_each_param(W& w, F&& f) {
  detail::visit_dense(w.encoder.input, "encoder.input", f);
  for (size_t i = 0; i < w.encoder.blocks.size(); ++i) {
    auto& b = w.encoder.blocks[i];
    const std::string p = "encoder.blocks." + std::to_string(i);
    detail::visit_norm(b.attn_norm, p + ".attn_norm", f);
    detail::visit_dense(b.query, p + ".query", f);
    detail::visit_dense(b.key, p + ".key", f);
    detail::visit_dense(b.value, p + ".value", f);
    detail::visit_dense(b.attn_out, p + ".attn_out", f);
    detail::visit_norm(b.ffn_norm, p + ".ffn_norm", f);
    detail::visit_dense(b.ffn_in, p + ".ffn_in", f);
    detail::visit_dense(b.ffn_out, p + ".ffn_out", f);
  }
  detail::visit_norm(w.encoder.final_norm, "encoder.final_norm", f);
  detail::visit_dense(w.encoder.output, "encoder.output", f);
  for (size_t i = 0; i < w.expander.layers.size(); ++i) {
    detail::visit_dense(w.expander.layers[i], "expander.layers." + std::to_string(i), f);
  }
}

bool is_transformer_block_param(const std::string& name);

ModelWeights init_weights(const EncoderConfig& enc, const ExpanderConfig& exp, uint64_t seed);
ModelWeights zeros_like(const ModelWeights& w);
size_t parameter_count(const ModelWeights& w);

/// Activations kept by a training forward pass.
struct BlockTape {
  Mat input;  // residual stream entering the block
  Mat attn_xhat;
  Vec attn_rstd;
  Mat normed_attn;
  Mat q, k, v, context;
  std::vector<Mat> probs;  // (sample, head) softmax matrices, S x S
  Mat mid;                 // residual stream after attention
  Mat ffn_xhat;
  Vec ffn_rstd;
  Mat normed_ffn;
  Mat hidden_pre;  // ffn_in output before the rectifier
};

struct EncoderTape {
  int batch = 0;
  std::vector<std::pair<int, int>> active;  // multi-hot input cells as (token row, pitch)
  std::vector<BlockTape> blocks;
  Mat final_in;
  Mat final_xhat;
  Vec final_rstd;
  Mat final_normed;
  Mat per_step;                         // output layer result, (B*S) x d
  std::vector<std::vector<int>> argmax;  // max pooling routes, per sample per dim
};

struct ExpanderTape {
  std::vector<Mat> inputs;      // input to each layer
  std::vector<Mat> pre_active;  // pre-rectifier values of hidden layers
};

/// Transformer encoder z = Enc(X) plus the MLP expander z' = Epd(z).
/// Each of the S time steps is a token: its 128-dim multi-hot pitch column is projected
/// to model_dim and summed with a sinusoidal position code. Pre-norm blocks, a final
/// layer norm, a per-step dense layer to embed_dim, then pooling over time.
class Model {
 public:
  Model(EncoderConfig enc, ExpanderConfig exp, uint64_t seed);
  Model(EncoderConfig enc, ExpanderConfig exp, ModelWeights weights);

  const EncoderConfig& encoder_config() const { return enc_; }
  const ExpanderConfig& expander_config() const { return exp_; }
  ModelWeights& weights() { return weights_; }
  const ModelWeights& weights() const { return weights_; }

  /// Rows are embeddings, in input order.
  Mat encode(const std::vector<PianoRollChunk>& chunks) const;
  Vec encode(const PianoRollChunk& chunk) const;
  Mat expand(const Mat& z) const;

  Mat encode_forward(const std::vector<const PianoRollChunk*>& batch, EncoderTape* tape) const;
  void encode_backward(const EncoderTape& tape, const Mat& dz, ModelWeights& grads) const;
  Mat expand_forward(const Mat& z, ExpanderTape* tape) const;
  /// Accumulates expander gradients and returns dL/dz.
  Mat expand_backward(const ExpanderTape& tape, const Mat& dzp, ModelWeights& grads) const;

 private:
  EncoderConfig enc_;
  ExpanderConfig exp_;
  ModelWeights weights_;
  Mat positions_;  // S x model_dim
};

}  // namespace motif

#pragma once

#include <functional>
#include <string>

#include "motif/encoder.h"

namespace motif {

struct AdamWConfig {
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.01;
};

/// AdamW with decoupled weight decay on ".weight" tensors (biases and norm parameters are not decayed).
class AdamW {
 public:
  AdamW(AdamWConfig cfg, const ModelWeights& like);

  /// Parameters rejected by the filter are left untouched, moments included.
  void step(ModelWeights& params, const ModelWeights& grads, const std::function<bool(const std::string&)>& trainable = {});

  const AdamWConfig& config() const { return cfg_; }
  void set_learning_rate(double lr) { cfg_.learning_rate = lr; }
  long steps_taken() const { return t_; }

  // Exposed for checkpointing.
  ModelWeights& first_moment() { return m_; }
  ModelWeights& second_moment() { return v_; }
  const ModelWeights& first_moment() const { return m_; }
  const ModelWeights& second_moment() const { return v_; }
  void set_steps_taken(long t) { t_ = t; }

 private:
  AdamWConfig cfg_;
  ModelWeights m_;
  ModelWeights v_;
  long t_ = 0;
};

}  // namespace motif

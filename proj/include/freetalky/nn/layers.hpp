#pragma once

#include "freetalky/nn/ops.hpp"

#include <random>
#include <string>
#include <utility>
#include <vector>

namespace freetalky::nn {

// Ordered, named collection of trainable tensors. Order is creation order and
// is what checkpoints and optimizers iterate over.
class ParameterSet {
 public:
  Var add(std::string name, Matrix init);

  const std::vector<std::pair<std::string, Var>>& entries() const { return entries_; }
  Var find(const std::string& name) const;
  void zero_grad();
  std::size_t scalar_count() const;

  // Flattened copy of every parameter value, in order.
  std::vector<double> snapshot() const;

 private:
  std::vector<std::pair<std::string, Var>> entries_;
};

Matrix random_normal(Eigen::Index rows, Eigen::Index cols, double stddev, std::mt19937_64& rng);

struct Linear {
  Var weight;  // in x out
  Var bias;    // 1 x out, may be undefined

  static Linear create(ParameterSet& params, const std::string& name, Eigen::Index in, Eigen::Index out,
                       std::mt19937_64& rng, double init_scale = 1.0, bool with_bias = true);
  Var operator()(const Var& x) const;
};

struct LayerNorm {
  Var gamma;
  Var beta;

  static LayerNorm create(ParameterSet& params, const std::string& name, Eigen::Index dim);
  Var operator()(const Var& x) const { return layer_norm(x, gamma, beta); }
};

struct MultiHeadAttention {
  Linear query;
  Linear key;
  Linear value;
  Linear output;
  int heads = 1;

  static MultiHeadAttention create(ParameterSet& params, const std::string& name, Eigen::Index dim, int heads,
                                   std::mt19937_64& rng, double output_scale);
  // Rows of `queries` attend over rows of `memory`.
  Var operator()(const Var& queries, const Var& memory, bool causal) const;
};

struct FeedForward {
  Linear expand;
  Linear contract;

  static FeedForward create(ParameterSet& params, const std::string& name, Eigen::Index dim, Eigen::Index hidden,
                            std::mt19937_64& rng, double output_scale);
  Var operator()(const Var& x) const { return contract(gelu(expand(x))); }
};

// Pre-norm block: self-attention, optional cross-attention, feed-forward.
struct TransformerBlock {
  LayerNorm self_norm;
  MultiHeadAttention self_attention;
  bool has_cross = false;
  LayerNorm cross_norm;
  MultiHeadAttention cross_attention;
  LayerNorm ff_norm;
  FeedForward feed_forward;
  bool causal = false;

  static TransformerBlock create(ParameterSet& params, const std::string& name, Eigen::Index dim, int heads,
                                 Eigen::Index ff_dim, bool causal, bool with_cross, int total_layers,
                                 std::mt19937_64& rng);

  // `memory` is only read when the block has cross-attention. `dropout_rng`
  // may be null, which disables dropout.
  Var operator()(const Var& x, const Var* memory, double dropout_rate, std::mt19937_64* dropout_rng) const;
};

}  // namespace freetalky::nn

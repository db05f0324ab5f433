#pragma once

#include "freetalky/nn/layers.hpp"

namespace freetalky::nn {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  // Global gradient-norm clip; 0 disables.
  double clip_norm = 1.0;
};

class Adam {
 public:
  Adam(const ParameterSet& params, AdamConfig config);

  // Applies one update from the accumulated gradients, scaled by
  // 1 / grad_divisor, then zeroes them.
  void step(double grad_divisor = 1.0);

  const AdamConfig& config() const { return config_; }
  void set_learning_rate(double lr) { config_.learning_rate = lr; }

 private:
  const ParameterSet* params_;
  AdamConfig config_;
  std::vector<Matrix> first_;
  std::vector<Matrix> second_;
  long steps_ = 0;
};

}  // namespace freetalky::nn

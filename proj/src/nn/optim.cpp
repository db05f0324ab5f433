#include "freetalky/nn/optim.hpp"

#include <cmath>

namespace freetalky::nn {

Adam::Adam(const ParameterSet& params, AdamConfig config) : params_(&params), config_(config) {
  for (const auto& [_, v] : params.entries()) {
    first_.push_back(Matrix::Zero(v.rows(), v.cols()));
    second_.push_back(Matrix::Zero(v.rows(), v.cols()));
  }
}

void Adam::step(double grad_divisor) {
  ++steps_;
  const auto& entries = params_->entries();
  const double inv = 1.0 / grad_divisor;

  double clip = 1.0;
  if (config_.clip_norm > 0.0) {
    double sq = 0.0;
    for (const auto& [_, v] : entries) sq += (inv * v.grad()).squaredNorm();
    const double norm = std::sqrt(sq);
    if (norm > config_.clip_norm) clip = config_.clip_norm / norm;
  }

  const double bc1 = 1.0 - std::pow(config_.beta1, static_cast<double>(steps_));
  const double bc2 = 1.0 - std::pow(config_.beta2, static_cast<double>(steps_));
  for (std::size_t i = 0; i < entries.size(); ++i) {
    Var v = entries[i].second;
    const Matrix g = (inv * clip) * v.grad();
    first_[i] = config_.beta1 * first_[i] + (1.0 - config_.beta1) * g;
    second_[i] = config_.beta2 * second_[i] + (1.0 - config_.beta2) * g.cwiseProduct(g);
    if (config_.learning_rate != 0.0) {
      v.mutable_value().array() -=
          config_.learning_rate * (first_[i].array() / bc1) / ((second_[i].array() / bc2).sqrt() + config_.epsilon);
    }
    v.zero_grad();
  }
}

}  // namespace freetalky::nn

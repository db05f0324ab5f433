#pragma once

#include <Eigen/Core>

#include <functional>
#include <memory>
#include <vector>

namespace freetalky::nn {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

namespace detail {

struct Node {
  Matrix value;
  Matrix grad;
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  // Reads this node's grad and accumulates into the parents' grads.
  std::function<void(Node&)> backward_fn;

  Matrix& grad_buffer() {
    if (grad.size() == 0) grad = Matrix::Zero(value.rows(), value.cols());
    return grad;
  }
};

}  // namespace detail

// A node in a reverse-mode autodiff graph. Copies share the underlying node.
class Var {
 public:
  Var() = default;

  static Var constant(Matrix value);
  static Var parameter(Matrix value);

  const Matrix& value() const { return node_->value; }
  Matrix& mutable_value() { return node_->value; }
  const Matrix& grad() const { return node_->grad_buffer(); }
  Matrix& mutable_grad() { return node_->grad_buffer(); }
  bool requires_grad() const { return node_ && node_->requires_grad; }
  bool defined() const { return static_cast<bool>(node_); }

  Eigen::Index rows() const { return node_->value.rows(); }
  Eigen::Index cols() const { return node_->value.cols(); }
  double item() const;

  // Seeds d(this)/d(this) = 1 on a 1x1 value and accumulates gradients into
  // every reachable node that requires them.
  void backward() const;
  void zero_grad() { node_->grad.setZero(node_->value.rows(), node_->value.cols()); }

  const std::shared_ptr<detail::Node>& node() const { return node_; }

  // Builds an op result. The backward closure is kept only when grad mode is
  // on and at least one parent requires a gradient.
  static Var make(Matrix value, std::vector<Var> parents, std::function<void(detail::Node&)> backward_fn);

 private:
  explicit Var(std::shared_ptr<detail::Node> node) : node_(std::move(node)) {}
  std::shared_ptr<detail::Node> node_;
};

// Disables graph recording on the current thread for its lifetime.
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

bool grad_enabled();

}  // namespace freetalky::nn

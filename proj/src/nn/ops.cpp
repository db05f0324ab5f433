#include "freetalky/nn/ops.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace freetalky::nn {

namespace {

using detail::Node;

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(std::string("shape mismatch: ") + what);
}

// Accumulates into parent i when it takes part in the gradient.
template <typename Expr>
void accumulate(Node& self, std::size_t i, const Expr& expr) {
  Node& p = *self.parents[i];
  if (p.requires_grad) p.grad_buffer() += expr;
}

constexpr double kGeluC = 0.7978845608028654;  // sqrt(2 / pi)
constexpr double kFloor = 1e-300;

}  // namespace

Var matmul(const Var& a, const Var& b) {
  require(a.cols() == b.rows(), "matmul");
  Matrix out = a.value() * b.value();
  return Var::make(std::move(out), {a, b}, [](Node& self) {
    const Matrix& A = self.parents[0]->value;
    const Matrix& B = self.parents[1]->value;
    accumulate(self, 0, self.grad * B.transpose());
    accumulate(self, 1, A.transpose() * self.grad);
  });
}

Var matmul_nt(const Var& a, const Var& b) {
  require(a.cols() == b.cols(), "matmul_nt");
  Matrix out = a.value() * b.value().transpose();
  return Var::make(std::move(out), {a, b}, [](Node& self) {
    const Matrix& A = self.parents[0]->value;
    const Matrix& B = self.parents[1]->value;
    accumulate(self, 0, self.grad * B);
    accumulate(self, 1, self.grad.transpose() * A);
  });
}

Var add(const Var& a, const Var& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), "add");
  Matrix out = a.value() + b.value();
  return Var::make(std::move(out), {a, b}, [](Node& self) {
    accumulate(self, 0, self.grad);
    accumulate(self, 1, self.grad);
  });
}

Var add_row(const Var& a, const Var& row_vec) {
  require(row_vec.rows() == 1 && row_vec.cols() == a.cols(), "add_row");
  Matrix out = a.value().rowwise() + row_vec.value().row(0);
  return Var::make(std::move(out), {a, row_vec}, [](Node& self) {
    accumulate(self, 0, self.grad);
    accumulate(self, 1, self.grad.colwise().sum());
  });
}

Var scale(const Var& a, double factor) { return affine(a, factor, 0.0); }

Var affine(const Var& a, double alpha, double beta) {
  Matrix out = (alpha * a.value().array() + beta).matrix();
  return Var::make(std::move(out), {a}, [alpha](Node& self) { accumulate(self, 0, alpha * self.grad); });
}

Var mul_col(const Var& a, const Var& col) {
  require(col.cols() == 1 && col.rows() == a.rows(), "mul_col");
  Matrix out = a.value().array().colwise() * col.value().col(0).array();
  return Var::make(std::move(out), {a, col}, [](Node& self) {
    const Matrix& A = self.parents[0]->value;
    const Matrix& C = self.parents[1]->value;
    accumulate(self, 0, (self.grad.array().colwise() * C.col(0).array()).matrix());
    accumulate(self, 1, (self.grad.array() * A.array()).rowwise().sum().matrix());
  });
}

Var gelu(const Var& a) {
  const auto& x = a.value().array();
  Matrix out = (0.5 * x * (1.0 + (kGeluC * (x + 0.044715 * x.cube())).tanh())).matrix();
  return Var::make(std::move(out), {a}, [](Node& self) {
    const auto x = self.parents[0]->value.array();
    const auto inner = kGeluC * (x + 0.044715 * x.cube());
    const auto t = inner.tanh();
    const auto d = 0.5 * (1.0 + t) + 0.5 * x * (1.0 - t.square()) * kGeluC * (1.0 + 3.0 * 0.044715 * x.square());
    accumulate(self, 0, (self.grad.array() * d).matrix());
  });
}

Var sigmoid(const Var& a) {
  Matrix out = (1.0 / (1.0 + (-a.value().array()).exp())).matrix();
  return Var::make(std::move(out), {a}, [](Node& self) {
    const auto y = self.value.array();
    accumulate(self, 0, (self.grad.array() * y * (1.0 - y)).matrix());
  });
}

Var layer_norm(const Var& x, const Var& gamma, const Var& beta, double eps) {
  require(gamma.rows() == 1 && gamma.cols() == x.cols(), "layer_norm gamma");
  require(beta.rows() == 1 && beta.cols() == x.cols(), "layer_norm beta");
  const Matrix& X = x.value();
  const Eigen::Index n = X.cols();
  Matrix xhat(X.rows(), n);
  Eigen::VectorXd inv_std(X.rows());
  for (Eigen::Index r = 0; r < X.rows(); ++r) {
    const double mean = X.row(r).mean();
    const double var = (X.row(r).array() - mean).square().mean();
    inv_std(r) = 1.0 / std::sqrt(var + eps);
    xhat.row(r) = (X.row(r).array() - mean) * inv_std(r);
  }
  Matrix out = (xhat.array().rowwise() * gamma.value().row(0).array()).matrix();
  out.rowwise() += beta.value().row(0);
  return Var::make(std::move(out), {x, gamma, beta}, [xhat = std::move(xhat), inv_std = std::move(inv_std), n](Node& self) {
    const Matrix& G = self.grad;
    const auto g = self.parents[1]->value.row(0).array();
    if (self.parents[0]->requires_grad) {
      Matrix dxhat = (G.array().rowwise() * g).matrix();
      Matrix dx(G.rows(), n);
      for (Eigen::Index r = 0; r < G.rows(); ++r) {
        const double m1 = dxhat.row(r).mean();
        const double m2 = (dxhat.row(r).array() * xhat.row(r).array()).mean();
        dx.row(r) = inv_std(r) * (dxhat.row(r).array() - m1 - xhat.row(r).array() * m2);
      }
      accumulate(self, 0, dx);
    }
    accumulate(self, 1, (G.array() * xhat.array()).colwise().sum().matrix());
    accumulate(self, 2, G.colwise().sum());
  });
}

namespace {

Matrix softmax_impl(const Matrix& a, bool causal) {
  Matrix out = Matrix::Zero(a.rows(), a.cols());
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    const Eigen::Index width = causal ? std::min<Eigen::Index>(r + 1, a.cols()) : a.cols();
    auto src = a.row(r).head(width);
    const double mx = src.maxCoeff();
    auto dst = out.row(r).head(width);
    dst = (src.array() - mx).exp().matrix();
    dst /= dst.sum();
  }
  return out;
}

Var softmax_var(const Var& a, bool causal) {
  Matrix out = softmax_impl(a.value(), causal);
  return Var::make(std::move(out), {a}, [](Node& self) {
    const Matrix& Y = self.value;
    const Eigen::VectorXd dot = (self.grad.array() * Y.array()).rowwise().sum();
    accumulate(self, 0, (Y.array() * (self.grad.colwise() - dot).array()).matrix());
  });
}

}  // namespace

Var softmax_rows(const Var& a) { return softmax_var(a, false); }

Var causal_softmax(const Var& a) { return softmax_var(a, true); }

Var embedding(const Var& table, std::span<const int> ids) {
  const Matrix& T = table.value();
  Matrix out(static_cast<Eigen::Index>(ids.size()), T.cols());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || ids[i] >= T.rows()) throw std::out_of_range("embedding id out of range");
    out.row(static_cast<Eigen::Index>(i)) = T.row(ids[i]);
  }
  std::vector<int> idx(ids.begin(), ids.end());
  return Var::make(std::move(out), {table}, [idx = std::move(idx)](Node& self) {
    Matrix& g = self.parents[0]->grad_buffer();
    for (std::size_t i = 0; i < idx.size(); ++i) g.row(idx[i]) += self.grad.row(static_cast<Eigen::Index>(i));
  });
}

Var slice_cols(const Var& a, Eigen::Index start, Eigen::Index count) {
  require(start >= 0 && count >= 0 && start + count <= a.cols(), "slice_cols");
  Matrix out = a.value().middleCols(start, count);
  return Var::make(std::move(out), {a}, [start, count](Node& self) {
    Node& p = *self.parents[0];
    if (p.requires_grad) p.grad_buffer().middleCols(start, count) += self.grad;
  });
}

Var concat_cols(std::span<const Var> parts) {
  if (parts.empty()) throw std::invalid_argument("concat_cols of nothing");
  Eigen::Index total = 0;
  for (const auto& p : parts) {
    require(p.rows() == parts[0].rows(), "concat_cols");
    total += p.cols();
  }
  Matrix out(parts[0].rows(), total);
  Eigen::Index at = 0;
  for (const auto& p : parts) {
    out.middleCols(at, p.cols()) = p.value();
    at += p.cols();
  }
  std::vector<Var> parents(parts.begin(), parts.end());
  return Var::make(std::move(out), std::move(parents), [](Node& self) {
    Eigen::Index off = 0;
    for (auto& p : self.parents) {
      const Eigen::Index w = p->value.cols();
      if (p->requires_grad) p->grad_buffer() += self.grad.middleCols(off, w);
      off += w;
    }
  });
}

Var row(const Var& a, Eigen::Index index) {
  require(index >= 0 && index < a.rows(), "row");
  Matrix out = a.value().row(index);
  return Var::make(std::move(out), {a}, [index](Node& self) {
    Node& p = *self.parents[0];
    if (p.requires_grad) p.grad_buffer().row(index) += self.grad.row(0);
  });
}

Var pad_cols(const Var& a, Eigen::Index extra) {
  Matrix out = Matrix::Zero(a.rows(), a.cols() + extra);
  out.leftCols(a.cols()) = a.value();
  const Eigen::Index width = a.cols();
  return Var::make(std::move(out), {a}, [width](Node& self) { accumulate(self, 0, self.grad.leftCols(width)); });
}

Var sum(const Var& a) {
  Matrix out(1, 1);
  out(0, 0) = a.value().sum();
  return Var::make(std::move(out), {a}, [](Node& self) {
    Node& p = *self.parents[0];
    if (p.requires_grad) p.grad_buffer().array() += self.grad(0, 0);
  });
}

Var cross_entropy(const Var& logits, std::span<const int> targets, std::size_t* counted) {
  const Matrix& L = logits.value();
  require(static_cast<Eigen::Index>(targets.size()) == L.rows(), "cross_entropy targets");
  std::size_t n = 0;
  for (int t : targets) n += t >= 0 ? 1 : 0;
  if (counted) *counted = n;
  if (n == 0) throw std::domain_error("cross_entropy: no labeled rows");

  Matrix probs = Matrix::Zero(L.rows(), L.cols());
  double total = 0.0;
  for (Eigen::Index r = 0; r < L.rows(); ++r) {
    const int t = targets[static_cast<std::size_t>(r)];
    if (t < 0) continue;
    if (t >= L.cols()) throw std::out_of_range("cross_entropy target out of range");
    const double mx = L.row(r).maxCoeff();
    probs.row(r) = (L.row(r).array() - mx).exp().matrix();
    const double z = probs.row(r).sum();
    probs.row(r) /= z;
    total += -(L(r, t) - mx - std::log(z));
  }
  Matrix out(1, 1);
  out(0, 0) = total / static_cast<double>(n);
  std::vector<int> tg(targets.begin(), targets.end());
  return Var::make(std::move(out), {logits}, [probs = std::move(probs), tg = std::move(tg), n](Node& self) {
    Node& p = *self.parents[0];
    if (!p.requires_grad) return;
    const double g = self.grad(0, 0) / static_cast<double>(n);
    Matrix& dst = p.grad_buffer();
    for (Eigen::Index r = 0; r < probs.rows(); ++r) {
      const int t = tg[static_cast<std::size_t>(r)];
      if (t < 0) continue;
      dst.row(r) += g * probs.row(r);
      dst(r, t) -= g;
    }
  });
}

Var nll_from_probs(const Var& probs, std::span<const int> targets) {
  const Matrix& P = probs.value();
  require(static_cast<Eigen::Index>(targets.size()) == P.rows(), "nll_from_probs targets");
  std::size_t n = 0;
  double total = 0.0;
  for (Eigen::Index r = 0; r < P.rows(); ++r) {
    const int t = targets[static_cast<std::size_t>(r)];
    if (t < 0) continue;
    if (t >= P.cols()) throw std::out_of_range("nll target out of range");
    total -= std::log(std::max(P(r, t), kFloor));
    ++n;
  }
  if (n == 0) throw std::domain_error("nll_from_probs: no labeled rows");
  Matrix out(1, 1);
  out(0, 0) = total / static_cast<double>(n);
  std::vector<int> tg(targets.begin(), targets.end());
  return Var::make(std::move(out), {probs}, [tg = std::move(tg), n](Node& self) {
    Node& p = *self.parents[0];
    if (!p.requires_grad) return;
    const double g = self.grad(0, 0) / static_cast<double>(n);
    Matrix& dst = p.grad_buffer();
    for (Eigen::Index r = 0; r < p.value.rows(); ++r) {
      const int t = tg[static_cast<std::size_t>(r)];
      if (t < 0) continue;
      dst(r, t) -= g / std::max(p.value(r, t), kFloor);
    }
  });
}

Var dropout(const Var& a, double rate, std::mt19937_64& rng) {
  if (rate <= 0.0) return a;
  if (rate >= 1.0) throw std::invalid_argument("dropout rate must be < 1");
  std::bernoulli_distribution keep(1.0 - rate);
  Matrix mask(a.rows(), a.cols());
  for (Eigen::Index i = 0; i < mask.size(); ++i) mask.data()[i] = keep(rng) ? 1.0 / (1.0 - rate) : 0.0;
  Matrix out = (a.value().array() * mask.array()).matrix();
  return Var::make(std::move(out), {a}, [mask = std::move(mask)](Node& self) {
    accumulate(self, 0, (self.grad.array() * mask.array()).matrix());
  });
}

}  // namespace freetalky::nn

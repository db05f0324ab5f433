#include "freetalky/nn/layers.hpp"

#include <cmath>
#include <stdexcept>

namespace freetalky::nn {

Var ParameterSet::add(std::string name, Matrix init) {
  if (find(name).defined()) throw std::invalid_argument("duplicate parameter name: " + name);
  Var v = Var::parameter(std::move(init));
  entries_.emplace_back(std::move(name), v);
  return v;
}

Var ParameterSet::find(const std::string& name) const {
  for (const auto& [n, v] : entries_)
    if (n == name) return v;
  return {};
}

void ParameterSet::zero_grad() {
  for (auto& [_, v] : entries_) {
    Var copy = v;
    copy.zero_grad();
  }
}

std::size_t ParameterSet::scalar_count() const {
  std::size_t n = 0;
  for (const auto& [_, v] : entries_) n += static_cast<std::size_t>(v.value().size());
  return n;
}

std::vector<double> ParameterSet::snapshot() const {
  std::vector<double> out;
  out.reserve(scalar_count());
  for (const auto& [_, v] : entries_) out.insert(out.end(), v.value().data(), v.value().data() + v.value().size());
  return out;
}

Matrix random_normal(Eigen::Index rows, Eigen::Index cols, double stddev, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, stddev);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = dist(rng);
  return m;
}

Linear Linear::create(ParameterSet& params, const std::string& name, Eigen::Index in, Eigen::Index out,
                      std::mt19937_64& rng, double init_scale, bool with_bias) {
  Linear l;
  l.weight = params.add(name + ".weight", random_normal(in, out, init_scale / std::sqrt(static_cast<double>(in)), rng));
  if (with_bias) l.bias = params.add(name + ".bias", Matrix::Zero(1, out));
  return l;
}

Var Linear::operator()(const Var& x) const {
  Var y = matmul(x, weight);
  return bias.defined() ? add_row(y, bias) : y;
}

LayerNorm LayerNorm::create(ParameterSet& params, const std::string& name, Eigen::Index dim) {
  return {params.add(name + ".gamma", Matrix::Ones(1, dim)), params.add(name + ".beta", Matrix::Zero(1, dim))};
}

MultiHeadAttention MultiHeadAttention::create(ParameterSet& params, const std::string& name, Eigen::Index dim,
                                              int heads, std::mt19937_64& rng, double output_scale) {
  if (heads <= 0 || dim % heads != 0) throw std::invalid_argument("embedding dim must be divisible by head count");
  MultiHeadAttention a;
  a.query = Linear::create(params, name + ".query", dim, dim, rng);
  a.key = Linear::create(params, name + ".key", dim, dim, rng);
  a.value = Linear::create(params, name + ".value", dim, dim, rng);
  a.output = Linear::create(params, name + ".output", dim, dim, rng, output_scale);
  a.heads = heads;
  return a;
}

Var MultiHeadAttention::operator()(const Var& queries, const Var& memory, bool causal) const {
  const Var q = query(queries);
  const Var k = key(memory);
  const Var v = value(memory);
  const Eigen::Index head_dim = q.cols() / heads;
  const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(head_dim));
  std::vector<Var> outs;
  outs.reserve(static_cast<std::size_t>(heads));
  for (int h = 0; h < heads; ++h) {
    const Eigen::Index off = h * head_dim;
    Var scores = scale(matmul_nt(slice_cols(q, off, head_dim), slice_cols(k, off, head_dim)), inv_sqrt);
    Var weights = causal ? causal_softmax(scores) : softmax_rows(scores);
    outs.push_back(matmul(weights, slice_cols(v, off, head_dim)));
  }
  return output(heads == 1 ? outs.front() : concat_cols(outs));
}

FeedForward FeedForward::create(ParameterSet& params, const std::string& name, Eigen::Index dim, Eigen::Index hidden,
                                std::mt19937_64& rng, double output_scale) {
  return {Linear::create(params, name + ".expand", dim, hidden, rng),
          Linear::create(params, name + ".contract", hidden, dim, rng, output_scale)};
}

TransformerBlock TransformerBlock::create(ParameterSet& params, const std::string& name, Eigen::Index dim, int heads,
                                          Eigen::Index ff_dim, bool causal, bool with_cross, int total_layers,
                                          std::mt19937_64& rng) {
  const double out_scale = 1.0 / std::sqrt(2.0 * std::max(1, total_layers));
  TransformerBlock b;
  b.self_norm = LayerNorm::create(params, name + ".self_norm", dim);
  b.self_attention = MultiHeadAttention::create(params, name + ".self_attn", dim, heads, rng, out_scale);
  b.has_cross = with_cross;
  if (with_cross) {
    b.cross_norm = LayerNorm::create(params, name + ".cross_norm", dim);
    b.cross_attention = MultiHeadAttention::create(params, name + ".cross_attn", dim, heads, rng, out_scale);
  }
  b.ff_norm = LayerNorm::create(params, name + ".ff_norm", dim);
  b.feed_forward = FeedForward::create(params, name + ".ff", dim, ff_dim, rng, out_scale);
  b.causal = causal;
  return b;
}

Var TransformerBlock::operator()(const Var& x, const Var* memory, double dropout_rate,
                                 std::mt19937_64* dropout_rng) const {
  auto drop = [&](const Var& v) { return dropout_rng ? dropout(v, dropout_rate, *dropout_rng) : v; };
  const Var normed = self_norm(x);
  Var h = add(x, drop(self_attention(normed, normed, causal)));
  if (has_cross) {
    if (!memory) throw std::invalid_argument("cross-attention block needs encoder memory");
    h = add(h, drop(cross_attention(cross_norm(h), *memory, false)));
  }
  return add(h, drop(feed_forward(ff_norm(h))));
}

}  // namespace freetalky::nn

#include "freetalky/nn/checkpoint.hpp"
#include "freetalky/nn/layers.hpp"
#include "freetalky/nn/ops.hpp"
#include "freetalky/nn/optim.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>

namespace nn = freetalky::nn;
using freetalky::testing::gradient_check;
using freetalky::testing::TempDir;

namespace {

nn::Matrix mat(std::initializer_list<std::initializer_list<double>> rows) {
  nn::Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index r = 0;
  for (const auto& row : rows) {
    Eigen::Index c = 0;
    for (double v : row) m(r, c++) = v;
    ++r;
  }
  return m;
}

}  // namespace

TEST(Ops, MatmulForward) {
  auto a = nn::Var::constant(mat({{1, 2}, {3, 4}}));
  auto b = nn::Var::constant(mat({{5}, {6}}));
  auto c = nn::matmul(a, b);
  EXPECT_DOUBLE_EQ(c.value()(0, 0), 17);
  EXPECT_DOUBLE_EQ(c.value()(1, 0), 39);
}

TEST(Ops, ShapeMismatchThrows) {
  auto a = nn::Var::constant(nn::Matrix::Zero(2, 3));
  auto b = nn::Var::constant(nn::Matrix::Zero(2, 3));
  EXPECT_THROW(nn::matmul(a, b), std::invalid_argument);
  EXPECT_THROW(nn::add(a, nn::Var::constant(nn::Matrix::Zero(3, 2))), std::invalid_argument);
}

TEST(Ops, SoftmaxRowsSumToOne) {
  std::mt19937_64 rng(3);
  auto a = nn::Var::constant(nn::random_normal(4, 7, 3.0, rng));
  auto s = nn::softmax_rows(a);
  for (Eigen::Index r = 0; r < 4; ++r) EXPECT_NEAR(s.value().row(r).sum(), 1.0, 1e-12);
}

TEST(Ops, CausalSoftmaxMasksFuture) {
  auto s = nn::causal_softmax(nn::Var::constant(nn::Matrix::Zero(3, 3)));
  EXPECT_DOUBLE_EQ(s.value()(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(s.value()(0, 1), 0.0);
  EXPECT_DOUBLE_EQ(s.value()(1, 2), 0.0);
  EXPECT_NEAR(s.value()(2, 1), 1.0 / 3.0, 1e-12);
}

TEST(Ops, CrossEntropyOfUniformLogitsIsLogClasses) {
  auto logits = nn::Var::constant(nn::Matrix::Zero(3, 11));
  std::vector<int> targets = {0, -1, 10};
  std::size_t counted = 0;
  auto loss = nn::cross_entropy(logits, targets, &counted);
  EXPECT_EQ(counted, 2u);
  EXPECT_NEAR(loss.item(), std::log(11.0), 1e-12);
}

TEST(Ops, CrossEntropyWithoutTargetsThrows) {
  auto logits = nn::Var::constant(nn::Matrix::Zero(2, 4));
  std::vector<int> targets = {-1, -1};
  EXPECT_THROW(nn::cross_entropy(logits, targets), std::domain_error);
}

TEST(Ops, GradientsMatchFiniteDifferences) {
  std::mt19937_64 rng(11);
  nn::ParameterSet params;
  auto w = params.add("w", nn::random_normal(5, 6, 0.5, rng));
  auto b = params.add("b", nn::random_normal(1, 6, 0.5, rng));
  auto g = params.add("g", nn::random_normal(1, 6, 0.5, rng).array() + 1.0);
  auto beta = params.add("beta", nn::random_normal(1, 6, 0.5, rng));
  auto c = params.add("c", nn::random_normal(4, 1, 0.5, rng));
  auto e = params.add("e", nn::random_normal(9, 5, 0.5, rng));
  const std::vector<int> ids = {3, 1, 8, 3};
  const std::vector<int> targets = {2, -1, 5, 0};

  auto loss = [&] {
    auto x = nn::embedding(e, ids);
    auto h = nn::add_row(nn::matmul(x, w), b);
    h = nn::layer_norm(nn::gelu(h), g, beta);
    auto gate = nn::sigmoid(c);
    auto mixed = nn::add(nn::mul_col(h, gate), nn::scale(nn::matmul(nn::causal_softmax(nn::matmul_nt(h, h)), h), 0.3));
    auto parts = std::vector<nn::Var>{nn::slice_cols(mixed, 0, 2), nn::affine(nn::slice_cols(mixed, 2, 4), 2.0, 0.1)};
    auto cat = nn::pad_cols(nn::concat_cols(parts), 2);
    auto probs = nn::softmax_rows(cat);
    return nn::add(nn::cross_entropy(cat, targets), nn::scale(nn::nll_from_probs(probs, targets), 0.5));
  };
  auto result = gradient_check(params, loss, 16, rng);
  EXPECT_LT(result.worst_relative_error, 1e-6) << result.worst_tensor;
}

TEST(Ops, TransformerBlockGradients) {
  std::mt19937_64 rng(5);
  nn::ParameterSet params;
  auto block = nn::TransformerBlock::create(params, "blk", 8, 2, 16, true, true, 1, rng);
  auto x = params.add("x", nn::random_normal(4, 8, 1.0, rng));
  auto mem = params.add("mem", nn::random_normal(3, 8, 1.0, rng));
  auto loss = [&] {
    auto y = block(x, &mem, 0.0, nullptr);
    return nn::sum(nn::scale(nn::add(y, y), 0.1));
  };
  auto result = gradient_check(params, loss, 12, rng);
  EXPECT_LT(result.worst_relative_error, 1e-6) << result.worst_tensor;
}

TEST(Ops, NoGradGuardSkipsGraph) {
  auto p = nn::Var::parameter(nn::Matrix::Ones(1, 1));
  {
    nn::NoGradGuard guard;
    EXPECT_FALSE(nn::grad_enabled());
    auto y = nn::scale(p, 2.0);
    EXPECT_FALSE(y.requires_grad());
  }
  EXPECT_TRUE(nn::grad_enabled());
  EXPECT_TRUE(nn::scale(p, 2.0).requires_grad());
}

TEST(Ops, DropoutZeroRateIsIdentity) {
  std::mt19937_64 rng(1);
  auto a = nn::Var::constant(nn::random_normal(3, 3, 1.0, rng));
  auto d = nn::dropout(a, 0.0, rng);
  EXPECT_TRUE(d.value().isApprox(a.value()));
}

TEST(Adam, MinimizesQuadratic) {
  nn::ParameterSet params;
  auto x = params.add("x", mat({{3.0, -2.0}}));
  nn::Adam opt(params, {.learning_rate = 0.1, .clip_norm = 0.0});
  const auto target = nn::Var::constant(mat({{1.0, 0.5}}));
  for (int i = 0; i < 500; ++i) {
    auto diff = nn::add(x, nn::scale(target, -1.0));
    auto loss = nn::sum(nn::matmul_nt(diff, diff));
    loss.backward();
    opt.step();
  }
  EXPECT_NEAR(x.value()(0, 0), 1.0, 1e-3);
  EXPECT_NEAR(x.value()(0, 1), 0.5, 1e-3);
}

TEST(Checkpoint, RoundTrip) {
  TempDir dir;
  std::mt19937_64 rng(2);
  nn::ParameterSet a;
  a.add("one", nn::random_normal(3, 4, 1.0, rng));
  a.add("two", nn::random_normal(1, 5, 1.0, rng));
  nn::save_checkpoint(dir / "m.ckpt", "toy", {{"k", 3}}, a);

  nn::ParameterSet b;
  b.add("one", nn::Matrix::Zero(3, 4));
  b.add("two", nn::Matrix::Zero(1, 5));
  nn::load_checkpoint_tensors(dir / "m.ckpt", "toy", b);
  EXPECT_EQ(a.snapshot(), b.snapshot());
  EXPECT_EQ(nn::read_checkpoint_header(dir / "m.ckpt").metadata["k"], 3);
}

TEST(Checkpoint, RejectsWrongKindAndShape) {
  TempDir dir;
  nn::ParameterSet a;
  a.add("w", nn::Matrix::Ones(2, 2));
  nn::save_checkpoint(dir / "m.ckpt", "toy", nlohmann::json::object(), a);
  nn::ParameterSet b;
  b.add("w", nn::Matrix::Zero(2, 3));
  EXPECT_THROW(nn::load_checkpoint_tensors(dir / "m.ckpt", "toy", b), nn::CheckpointError);
  nn::ParameterSet c;
  c.add("w", nn::Matrix::Zero(2, 2));
  EXPECT_THROW(nn::load_checkpoint_tensors(dir / "m.ckpt", "other", c), nn::CheckpointError);
  EXPECT_THROW(nn::read_checkpoint_header(dir / "missing.ckpt"), nn::CheckpointError);
}

TEST(Checkpoint, RejectsCorruptMagic) {
  TempDir dir;
  {
    std::ofstream out(dir / "bad.ckpt", std::ios::binary);
    out << "NOTACKPT0000000000";
  }
  EXPECT_THROW(nn::read_checkpoint_header(dir / "bad.ckpt"), nn::CheckpointError);
}

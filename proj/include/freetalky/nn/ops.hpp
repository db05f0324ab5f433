#pragma once

#include "freetalky/nn/tensor.hpp"

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace freetalky::nn {

// Differentiable matrix operations. Shapes are checked and mismatches throw
// std::invalid_argument.

Var matmul(const Var& a, const Var& b);
// a * b^T
Var matmul_nt(const Var& a, const Var& b);
Var add(const Var& a, const Var& b);
// Adds a 1xC row to every row of a.
Var add_row(const Var& a, const Var& row);
Var scale(const Var& a, double factor);
// alpha * a + beta, elementwise.
Var affine(const Var& a, double alpha, double beta);
// Multiplies row r of a by col(r, 0).
Var mul_col(const Var& a, const Var& col);

Var gelu(const Var& a);
Var sigmoid(const Var& a);

Var layer_norm(const Var& x, const Var& gamma, const Var& beta, double eps = 1e-5);

Var softmax_rows(const Var& a);
// Row-wise softmax where entry (i, j) with j > i is masked out.
Var causal_softmax(const Var& a);

// Gathers rows of table by id.
Var embedding(const Var& table, std::span<const int> ids);
Var slice_cols(const Var& a, Eigen::Index start, Eigen::Index count);
Var concat_cols(std::span<const Var> parts);
Var row(const Var& a, Eigen::Index index);
// Appends `extra` zero columns.
Var pad_cols(const Var& a, Eigen::Index extra);

Var sum(const Var& a);

// Mean softmax cross-entropy over rows whose target is >= 0. Returns the
// number of counted rows through `counted` when non-null. Throws
// std::domain_error when no row is counted.
Var cross_entropy(const Var& logits, std::span<const int> targets, std::size_t* counted = nullptr);

// Mean of -log probs(r, targets[r]) over rows with target >= 0.
Var nll_from_probs(const Var& probs, std::span<const int> targets);

Var dropout(const Var& a, double rate, std::mt19937_64& rng);

}  // namespace freetalky::nn

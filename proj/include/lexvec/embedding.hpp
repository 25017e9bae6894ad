#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lexvec/cooc.hpp"
#include "lexvec/vocab.hpp"

namespace lexvec {

// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Word matrix W (|V| x d) and context matrix (|C_ctx| x d).
struct EmbeddingPair {
  Matrix words;
  Matrix contexts;

  std::size_t dim() const noexcept { return words.cols(); }
  bool operator==(const EmbeddingPair&) const = default;
};

// Entries uniform in (-0.5/d, 0.5/d), both matrices.
EmbeddingPair init_embeddings(std::size_t vocab_size, std::size_t context_size, std::size_t dim,
                              std::uint64_t seed);

double dot(std::span<const double> a, std::span<const double> b);

// One SGD step on 1/2 (W_w . C_c - target)^2, updating both rows from their
// pre-update values. Returns the loss before the step.
double sgd_update(EmbeddingPair& emb, WordId w, ContextId c, double target, double lr);

// Same step through relaxed atomic element access, for lock-free parallel
// training. Concurrent callers may lose updates but never tear a value.
double sgd_update_relaxed(EmbeddingPair& emb, WordId w, ContextId c, double target, double lr);

}  // namespace lexvec

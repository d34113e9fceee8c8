#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hfcl/data/sample.hpp"
#include "hfcl/nn/model.hpp"
#include "hfcl/rng.hpp"

namespace hfcl::nn {

// Row-major batch of vectors, one row per sample.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const {
    return data[r * cols + c];
  }
  std::span<const double> row(std::size_t r) const {
    return {data.data() + r * cols, cols};
  }
};

// Stacked one-hot labels of a batch.
Matrix labels_of(data::SampleSpan batch);

// f(X_i | theta) for every sample of the batch.
Matrix forward(const ModelParams& params, data::SampleSpan batch);

// Per-sample squared Frobenius distance, averaged over the batch.
double loss_mse(const Matrix& pred, const Matrix& labels);

inline constexpr double kXentClamp = 1e-12;

// Per-class binary cross-entropy summed over classes and averaged over the
// batch; predictions are clamped to [kXentClamp, 1 - kXentClamp].
double loss_xent(const Matrix& pred, const Matrix& labels);

double loss(Loss kind, const Matrix& pred, const Matrix& labels);

// Mean loss of the model over a batch.
double evaluate_loss(const ModelParams& params, data::SampleSpan batch,
                     Loss kind);

// (1/|batch|) sum_i grad_theta J(f(X_i|theta), Y_i). Provenance is clean.
GradientVector backward(const ModelParams& params, data::SampleSpan batch,
                        Loss kind = Loss::kCrossEntropy);

// theta - eta * g. The input is left untouched.
ModelParams sgd_step(const ModelParams& params, const GradientVector& g,
                     double eta);

// Mean of per-mini-batch mean gradients where the shard, reordered by
// `order`, is split into `minibatches` contiguous pieces and the last piece
// takes the remainder.
GradientVector minibatch_gradient_ordered(const ModelParams& params,
                                          data::SampleSpan shard,
                                          std::size_t minibatches,
                                          std::span<const std::size_t> order,
                                          Loss kind = Loss::kCrossEntropy);

// Same with a uniformly random order drawn from `rng`.
GradientVector minibatch_gradient(const ModelParams& params,
                                  data::SampleSpan shard,
                                  std::size_t minibatches, Rng& rng,
                                  Loss kind = Loss::kCrossEntropy);

// Percentage of samples whose arg-max prediction matches the label.
double evaluate_accuracy(const ModelParams& params, data::SampleSpan batch);

}  // namespace hfcl::nn

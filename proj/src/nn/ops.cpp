#include "hfcl/nn/ops.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hfcl/error.hpp"
#include "hfcl/nn/kernels.hpp"

namespace hfcl::nn {
namespace {

void check_same_shape(const Matrix& a, const Matrix& b, const char* what) {
  if (a.rows != b.rows || a.cols != b.cols) {
    throw ShapeError(std::string(what) + ": prediction is " +
                     std::to_string(a.rows) + "x" + std::to_string(a.cols) +
                     ", labels are " + std::to_string(b.rows) + "x" +
                     std::to_string(b.cols));
  }
}

}  // namespace

Matrix labels_of(data::SampleSpan batch) {
  if (batch.empty()) return {};
  Matrix m(batch.size(), batch.front().label.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    if (batch[i].label.size() != m.cols) {
      throw ShapeError("labels of sample " + std::to_string(i) +
                       " differ in length from sample 0");
    }
    std::copy(batch[i].label.begin(), batch[i].label.end(),
              m.data.begin() + i * m.cols);
  }
  return m;
}

Matrix forward(const ModelParams& params, data::SampleSpan batch) {
  params.validate();
  kernels::check_batch(*params.spec, batch, false);
  Matrix out(batch.size(), params.spec->output_size());
  kernels::parallel::predict(*params.spec, params.theta, batch, out);
  return out;
}

double loss_mse(const Matrix& pred, const Matrix& labels) {
  check_same_shape(pred, labels, "mse");
  if (pred.rows == 0) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < pred.data.size(); ++i) {
    const double d = pred.data[i] - labels.data[i];
    total += d * d;
  }
  return total / static_cast<double>(pred.rows);
}

double loss_xent(const Matrix& pred, const Matrix& labels) {
  check_same_shape(pred, labels, "cross-entropy");
  if (pred.rows == 0) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < pred.data.size(); ++i) {
    const double p = std::clamp(pred.data[i], kXentClamp, 1.0 - kXentClamp);
    const double y = labels.data[i];
    total += y * std::log(p) + (1.0 - y) * std::log(1.0 - p);
  }
  return -total / static_cast<double>(pred.rows);
}

double loss(Loss kind, const Matrix& pred, const Matrix& labels) {
  return kind == Loss::kMse ? loss_mse(pred, labels) : loss_xent(pred, labels);
}

double evaluate_loss(const ModelParams& params, data::SampleSpan batch,
                     Loss kind) {
  return loss(kind, forward(params, batch), labels_of(batch));
}

GradientVector backward(const ModelParams& params, data::SampleSpan batch,
                        Loss kind) {
  if (batch.empty()) throw ShapeError("gradient of an empty batch");
  params.validate();
  kernels::check_batch(*params.spec, batch, true);
  GradientVector out;
  out.g.assign(params.size(), 0.0);
  kernels::parallel::gradient_sum(*params.spec, params.theta, batch, kind,
                                  out.g);
  const double inv = 1.0 / static_cast<double>(batch.size());
  for (double& v : out.g) v *= inv;
  return out;
}

ModelParams sgd_step(const ModelParams& params, const GradientVector& g,
                     double eta) {
  if (g.size() != params.size()) {
    throw ShapeError("gradient has length " + std::to_string(g.size()) +
                     ", parameters have " + std::to_string(params.size()));
  }
  ModelParams next = params;
  for (std::size_t i = 0; i < next.theta.size(); ++i) {
    next.theta[i] -= eta * g.g[i];
  }
  return next;
}

GradientVector minibatch_gradient_ordered(const ModelParams& params,
                                          data::SampleSpan shard,
                                          std::size_t minibatches,
                                          std::span<const std::size_t> order,
                                          Loss kind) {
  if (shard.empty()) throw ShapeError("mini-batch gradient of an empty shard");
  if (minibatches < 1 || minibatches > shard.size()) {
    throw ShapeError("cannot split " + std::to_string(shard.size()) +
                     " samples into " + std::to_string(minibatches) +
                     " mini-batches");
  }
  if (order.size() != shard.size()) {
    throw ShapeError("sample order does not cover the shard");
  }
  if (minibatches == 1) {
    // Order does not change the set, so skip the gather.
    return backward(params, shard, kind);
  }
  const std::size_t base = shard.size() / minibatches;
  GradientVector out;
  out.g.assign(params.size(), 0.0);
  std::vector<data::Sample> batch;
  for (std::size_t m = 0; m < minibatches; ++m) {
    const std::size_t begin = m * base;
    const std::size_t end = (m + 1 == minibatches) ? shard.size() : begin + base;
    batch.clear();
    for (std::size_t i = begin; i < end; ++i) batch.push_back(shard[order[i]]);
    const GradientVector gm = backward(params, batch, kind);
    for (std::size_t j = 0; j < out.g.size(); ++j) out.g[j] += gm.g[j];
  }
  const double inv = 1.0 / static_cast<double>(minibatches);
  for (double& v : out.g) v *= inv;
  return out;
}

GradientVector minibatch_gradient(const ModelParams& params,
                                  data::SampleSpan shard,
                                  std::size_t minibatches, Rng& rng,
                                  Loss kind) {
  std::vector<std::size_t> order(shard.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  return minibatch_gradient_ordered(params, shard, minibatches, order, kind);
}

double evaluate_accuracy(const ModelParams& params, data::SampleSpan batch) {
  if (batch.empty()) throw ShapeError("accuracy of an empty set");
  const Matrix pred = forward(params, batch);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto row = pred.row(i);
    const auto best = static_cast<std::size_t>(
        std::max_element(row.begin(), row.end()) - row.begin());
    if (best == batch[i].label_index()) ++correct;
  }
  return 100.0 * static_cast<double>(correct) /
         static_cast<double>(batch.size());
}

}  // namespace hfcl::nn

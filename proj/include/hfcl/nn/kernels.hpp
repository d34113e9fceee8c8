#pragma once

// Batch kernels behind forward() and backward(). Each comes in a serial
// reference form and an OpenMP form. The OpenMP gradient sums fixed-size
// chunks of samples and reduces the chunk totals in chunk order, so its
// result does not depend on the thread count or schedule. With a single
// chunk it is bit-identical to the serial form.

#include <cstddef>
#include <span>

#include "hfcl/data/sample.hpp"
#include "hfcl/nn/model.hpp"
#include "hfcl/nn/ops.hpp"

namespace hfcl::nn::kernels {

// Samples per reduction chunk in the parallel gradient.
inline constexpr std::size_t kGradientChunk = 32;

namespace serial {

// out(i, :) = f(X_i | theta). `out` must be batch x output_size.
void predict(const ModelSpec& spec, std::span<const double> theta,
             data::SampleSpan batch, Matrix& out);

// accum += sum_i grad_theta J_i, summed in sample order.
void gradient_sum(const ModelSpec& spec, std::span<const double> theta,
                  data::SampleSpan batch, Loss loss, std::span<double> accum);

}  // namespace serial

namespace parallel {

void predict(const ModelSpec& spec, std::span<const double> theta,
             data::SampleSpan batch, Matrix& out);

void gradient_sum(const ModelSpec& spec, std::span<const double> theta,
                  data::SampleSpan batch, Loss loss, std::span<double> accum);

}  // namespace parallel

// Validates batch shapes against the model; throws ShapeError.
void check_batch(const ModelSpec& spec, data::SampleSpan batch,
                 bool need_labels);

}  // namespace hfcl::nn::kernels

#include "hfcl/nn/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "hfcl/error.hpp"

namespace hfcl::nn::kernels {
namespace {

void activate(Activation act, std::span<const double> z, std::span<double> a) {
  switch (act) {
    case Activation::kIdentity:
      std::copy(z.begin(), z.end(), a.begin());
      return;
    case Activation::kSigmoid:
      for (std::size_t i = 0; i < z.size(); ++i) a[i] = 1.0 / (1.0 + std::exp(-z[i]));
      return;
    case Activation::kTanh:
      for (std::size_t i = 0; i < z.size(); ++i) a[i] = std::tanh(z[i]);
      return;
    case Activation::kRelu:
      for (std::size_t i = 0; i < z.size(); ++i) a[i] = z[i] > 0.0 ? z[i] : 0.0;
      return;
    case Activation::kSoftmax: {
      const double zmax = *std::max_element(z.begin(), z.end());
      double sum = 0.0;
      for (std::size_t i = 0; i < z.size(); ++i) {
        a[i] = std::exp(z[i] - zmax);
        sum += a[i];
      }
      for (std::size_t i = 0; i < z.size(); ++i) a[i] /= sum;
      return;
    }
  }
}

// In-place: grad holds dL/da on entry and dL/dz on exit.
void activation_backward(Activation act, std::span<const double> z,
                         std::span<const double> a, std::span<double> grad) {
  switch (act) {
    case Activation::kIdentity:
      return;
    case Activation::kSigmoid:
      for (std::size_t i = 0; i < a.size(); ++i) grad[i] *= a[i] * (1.0 - a[i]);
      return;
    case Activation::kTanh:
      for (std::size_t i = 0; i < a.size(); ++i) grad[i] *= 1.0 - a[i] * a[i];
      return;
    case Activation::kRelu:
      for (std::size_t i = 0; i < a.size(); ++i) {
        if (!(z[i] > 0.0)) grad[i] = 0.0;
      }
      return;
    case Activation::kSoftmax: {
      double dot = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) dot += grad[i] * a[i];
      for (std::size_t i = 0; i < a.size(); ++i) grad[i] = a[i] * (grad[i] - dot);
      return;
    }
  }
}

bool all_finite(std::span<const double> v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

[[noreturn]] void non_finite(const ModelSpec& spec, std::size_t layer,
                             const char* where) {
  throw NumericError("non-finite " + std::string(where) + " in layer " +
                     std::to_string(layer) + " (" +
                     spec.layers()[layer].describe() + ")");
}

// Per-sample scratch: pre-activations z[l] and activations a[l] per layer,
// plus a delta buffer sized for the widest layer.
struct Workspace {
  std::vector<std::vector<double>> z;
  std::vector<std::vector<double>> a;
  std::vector<double> delta;
  std::vector<double> delta_prev;

  explicit Workspace(const ModelSpec& spec) {
    std::size_t widest = spec.input_shape().size();
    for (const auto& l : spec.layers()) {
      z.emplace_back(l.units);
      a.emplace_back(l.units);
      widest = std::max(widest, l.units);
    }
    delta.resize(widest);
    delta_prev.resize(widest);
  }
};

void forward_sample(const ModelSpec& spec, std::span<const double> theta,
                    std::span<const double> input, Workspace& ws) {
  std::span<const double> prev = input;
  for (std::size_t li = 0; li < spec.layers().size(); ++li) {
    const LayerSpec& l = spec.layers()[li];
    const std::size_t n_in = l.input.size();
    const double* w = theta.data() + spec.offset(li);
    const double* b = w + n_in * l.units;
    std::vector<double>& z = ws.z[li];
    for (std::size_t o = 0; o < l.units; ++o) {
      const double* row = w + o * n_in;
      double acc = l.bias ? b[o] : 0.0;
      for (std::size_t i = 0; i < n_in; ++i) acc += row[i] * prev[i];
      z[o] = acc;
    }
    activate(l.activation, z, ws.a[li]);
    if (!all_finite(ws.a[li])) non_finite(spec, li, "activation");
    prev = ws.a[li];
  }
}

// dL/d(output) for one sample, written into `grad`.
void loss_gradient(Loss loss, std::span<const double> pred,
                   std::span<const double> label, std::span<double> grad) {
  for (std::size_t c = 0; c < pred.size(); ++c) {
    if (loss == Loss::kMse) {
      grad[c] = 2.0 * (pred[c] - label[c]);
    } else {
      const double p = pred[c];
      // The clamp is flat outside [eps, 1 - eps].
      if (p < kXentClamp || p > 1.0 - kXentClamp) {
        grad[c] = 0.0;
      } else {
        grad[c] = -label[c] / p + (1.0 - label[c]) / (1.0 - p);
      }
    }
  }
}

void backward_sample(const ModelSpec& spec, std::span<const double> theta,
                     const data::Sample& s, Loss loss, Workspace& ws,
                     std::span<double> accum) {
  forward_sample(spec, theta, s.input, ws);
  const std::size_t last = spec.layers().size() - 1;
  std::span<double> delta(ws.delta.data(), spec.layers()[last].units);
  loss_gradient(loss, ws.a[last], s.label, delta);

  for (std::size_t li = last + 1; li-- > 0;) {
    const LayerSpec& l = spec.layers()[li];
    const std::size_t n_in = l.input.size();
    delta = std::span<double>(ws.delta.data(), l.units);
    activation_backward(l.activation, ws.z[li], ws.a[li], delta);
    if (!all_finite(delta)) non_finite(spec, li, "gradient");

    std::span<const double> prev =
        li == 0 ? std::span<const double>(s.input) : std::span<const double>(ws.a[li - 1]);
    const double* w = theta.data() + spec.offset(li);
    double* gw = accum.data() + spec.offset(li);
    double* gb = gw + n_in * l.units;
    for (std::size_t o = 0; o < l.units; ++o) {
      const double d = delta[o];
      double* grow = gw + o * n_in;
      for (std::size_t i = 0; i < n_in; ++i) grow[i] += d * prev[i];
      if (l.bias) gb[o] += d;
    }
    if (li == 0) break;
    std::fill_n(ws.delta_prev.begin(), n_in, 0.0);
    for (std::size_t o = 0; o < l.units; ++o) {
      const double d = delta[o];
      const double* row = w + o * n_in;
      for (std::size_t i = 0; i < n_in; ++i) ws.delta_prev[i] += row[i] * d;
    }
    std::swap(ws.delta, ws.delta_prev);
  }
}

void require_trainable(const ModelSpec& spec) {
  if (!spec.trainable()) {
    throw ShapeError("model contains layers that are parameter-count only");
  }
}

}  // namespace

void check_batch(const ModelSpec& spec, data::SampleSpan batch,
                 bool need_labels) {
  require_trainable(spec);
  const std::size_t n_in = spec.input_shape().size();
  for (std::size_t i = 0; i < batch.size(); ++i) {
    if (batch[i].input.size() != n_in) {
      throw ShapeError("sample " + std::to_string(i) + " has " +
                       std::to_string(batch[i].input.size()) +
                       " inputs, model expects " + std::to_string(n_in));
    }
    if (need_labels && batch[i].label.size() != spec.output_size()) {
      throw ShapeError("sample " + std::to_string(i) + " has " +
                       std::to_string(batch[i].label.size()) +
                       " label entries, model produces " +
                       std::to_string(spec.output_size()));
    }
  }
}

namespace serial {

void predict(const ModelSpec& spec, std::span<const double> theta,
             data::SampleSpan batch, Matrix& out) {
  Workspace ws(spec);
  const std::size_t last = spec.layers().size() - 1;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    forward_sample(spec, theta, batch[i].input, ws);
    std::copy(ws.a[last].begin(), ws.a[last].end(),
              out.data.begin() + i * out.cols);
  }
}

void gradient_sum(const ModelSpec& spec, std::span<const double> theta,
                  data::SampleSpan batch, Loss loss, std::span<double> accum) {
  Workspace ws(spec);
  for (const auto& s : batch) backward_sample(spec, theta, s, loss, ws, accum);
}

}  // namespace serial

namespace parallel {

void predict(const ModelSpec& spec, std::span<const double> theta,
             data::SampleSpan batch, Matrix& out) {
  const long n = static_cast<long>(batch.size());
  std::string error;
#pragma omp parallel
  {
    Workspace ws(spec);
    const std::size_t last = spec.layers().size() - 1;
#pragma omp for schedule(static)
    for (long i = 0; i < n; ++i) {
      try {
        forward_sample(spec, theta, batch[i].input, ws);
        std::copy(ws.a[last].begin(), ws.a[last].end(),
                  out.data.begin() + i * out.cols);
      } catch (const NumericError& e) {
#pragma omp critical(hfcl_kernel_error)
        if (error.empty()) error = e.what();
      }
    }
  }
  if (!error.empty()) throw NumericError(error);
}

void gradient_sum(const ModelSpec& spec, std::span<const double> theta,
                  data::SampleSpan batch, Loss loss, std::span<double> accum) {
  const std::size_t chunks =
      (batch.size() + kGradientChunk - 1) / kGradientChunk;
  if (chunks <= 1) {
    serial::gradient_sum(spec, theta, batch, loss, accum);
    return;
  }
  const std::size_t p = accum.size();
  std::vector<double> partial(chunks * p, 0.0);
  std::string error;
#pragma omp parallel
  {
    Workspace ws(spec);
#pragma omp for schedule(static)
    for (long c = 0; c < static_cast<long>(chunks); ++c) {
      const std::size_t begin = c * kGradientChunk;
      const std::size_t end = std::min(batch.size(), begin + kGradientChunk);
      std::span<double> out(partial.data() + c * p, p);
      try {
        for (std::size_t i = begin; i < end; ++i) {
          backward_sample(spec, theta, batch[i], loss, ws, out);
        }
      } catch (const NumericError& e) {
#pragma omp critical(hfcl_kernel_error)
        if (error.empty()) error = e.what();
      }
    }
  }
  if (!error.empty()) throw NumericError(error);
  for (std::size_t c = 0; c < chunks; ++c) {
    const double* src = partial.data() + c * p;
    for (std::size_t j = 0; j < p; ++j) accum[j] += src[j];
  }
}

}  // namespace parallel
}  // namespace hfcl::nn::kernels

#include "hfcl/nn/model.hpp"

#include <cmath>
#include <sstream>

#include "hfcl/error.hpp"

namespace hfcl::nn {

std::string to_string(const Shape& s) {
  std::ostringstream os;
  os << s.rows << "x" << s.cols << "x" << s.channels;
  return os.str();
}

const char* to_string(Activation a) {
  switch (a) {
    case Activation::kIdentity: return "identity";
    case Activation::kSigmoid: return "sigmoid";
    case Activation::kTanh: return "tanh";
    case Activation::kRelu: return "relu";
    case Activation::kSoftmax: return "softmax";
  }
  return "?";
}

const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::kClean: return "clean";
    case Provenance::kQuantized: return "quantized";
    case Provenance::kQuantizedNoised: return "quantized+noised";
  }
  return "?";
}

const char* to_string(Loss l) {
  return l == Loss::kCrossEntropy ? "xent" : "mse";
}

std::size_t LayerSpec::param_count() const {
  if (kind == LayerKind::kConv2d) return units * kernel_rows * kernel_cols;
  return input.size() * units + (bias ? units : 0);
}

std::string LayerSpec::describe() const {
  std::ostringstream os;
  if (kind == LayerKind::kDense) {
    os << "dense " << input.size() << "->" << units << " "
       << to_string(activation);
  } else {
    os << "conv " << kernel_rows << "x" << kernel_cols << "@" << units << " "
       << to_string(input) << "->" << to_string(output);
  }
  return os.str();
}

ModelSpec::ModelSpec(std::vector<LayerSpec> layers)
    : layers_(std::move(layers)) {
  if (layers_.empty()) throw ShapeError("model has no layers");
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const LayerSpec& l = layers_[i];
    if (l.units == 0) throw ShapeError("layer " + std::to_string(i) + " has no units");
    if (l.kind == LayerKind::kDense) {
      if (l.output.size() != l.units) {
        throw ShapeError("dense layer " + std::to_string(i) +
                         " output shape does not match its unit count");
      }
    } else if (l.output.channels != l.units) {
      throw ShapeError("conv layer " + std::to_string(i) +
                       " output channels do not match its filter count");
    }
    if (i > 0 && !(layers_[i - 1].output == l.input)) {
      throw ShapeError("layer " + std::to_string(i - 1) + " output " +
                       to_string(layers_[i - 1].output) +
                       " does not feed layer " + std::to_string(i) +
                       " input " + to_string(l.input));
    }
    offsets_.push_back(param_count_);
    param_count_ += l.param_count();
  }
}

ModelSpec ModelSpec::mlp(const std::vector<std::size_t>& widths,
                         Activation hidden, Activation head) {
  if (widths.size() < 2) throw ShapeError("an MLP needs at least two widths");
  std::vector<LayerSpec> layers;
  for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
    LayerSpec l;
    l.kind = LayerKind::kDense;
    l.input = {1, widths[i], 1};
    l.output = {1, widths[i + 1], 1};
    l.units = widths[i + 1];
    l.activation = (i + 2 == widths.size()) ? head : hidden;
    layers.push_back(l);
  }
  return ModelSpec(std::move(layers));
}

ModelSpec ModelSpec::desk_mlp(std::size_t input_size, std::size_t hidden,
                              std::size_t classes) {
  return mlp({input_size, hidden, classes});
}

ModelSpec ModelSpec::paper_cnn_count() {
  LayerSpec c1;
  c1.kind = LayerKind::kConv2d;
  c1.input = {28, 28, 1};
  c1.output = {24, 24, 128};
  c1.units = 128;
  c1.kernel_rows = c1.kernel_cols = 5;
  c1.bias = false;
  c1.activation = Activation::kRelu;
  LayerSpec c2 = c1;
  c2.input = c1.output;
  c2.output = {22, 22, 128};
  c2.kernel_rows = c2.kernel_cols = 3;
  return ModelSpec({c1, c2});
}

bool ModelSpec::trainable() const {
  for (const auto& l : layers_) {
    if (l.kind != LayerKind::kDense) return false;
  }
  return true;
}

bool operator==(const ModelSpec& a, const ModelSpec& b) {
  if (a.layers_.size() != b.layers_.size()) return false;
  for (std::size_t i = 0; i < a.layers_.size(); ++i) {
    const auto& x = a.layers_[i];
    const auto& y = b.layers_[i];
    if (x.kind != y.kind || !(x.input == y.input) || !(x.output == y.output) ||
        x.units != y.units || x.kernel_rows != y.kernel_rows ||
        x.kernel_cols != y.kernel_cols || x.bias != y.bias ||
        x.activation != y.activation) {
      return false;
    }
  }
  return true;
}

void ModelParams::validate() const {
  if (!spec) throw ShapeError("parameters have no model spec");
  if (theta.size() != spec->param_count()) {
    throw ShapeError("parameter vector has length " +
                     std::to_string(theta.size()) + ", model needs " +
                     std::to_string(spec->param_count()));
  }
  for (std::size_t i = 0; i < theta.size(); ++i) {
    if (!std::isfinite(theta[i])) {
      throw NumericError("non-finite parameter at index " + std::to_string(i));
    }
  }
}

ModelParams init_params(std::shared_ptr<const ModelSpec> spec,
                        std::uint64_t seed) {
  ModelParams p{spec, std::vector<double>(spec->param_count(), 0.0)};
  Rng rng = make_rng(seed, Stream::kInit);
  for (std::size_t li = 0; li < spec->layers().size(); ++li) {
    const LayerSpec& l = spec->layers()[li];
    const double fan_in = static_cast<double>(
        l.kind == LayerKind::kDense ? l.input.size()
                                    : l.kernel_rows * l.kernel_cols);
    const double fan_out = static_cast<double>(l.units);
    const double a = std::sqrt(6.0 / (fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-a, a);
    const std::size_t weights =
        l.kind == LayerKind::kDense ? l.input.size() * l.units : l.param_count();
    double* w = p.theta.data() + spec->offset(li);
    for (std::size_t i = 0; i < weights; ++i) w[i] = dist(rng);
  }
  return p;
}

ModelParams zero_params(std::shared_ptr<const ModelSpec> spec) {
  const std::size_t n = spec->param_count();
  return ModelParams{std::move(spec), std::vector<double>(n, 0.0)};
}

double GradientVector::norm_squared() const {
  double s = 0.0;
  for (double v : g) s += v * v;
  return s;
}

void TrainingConfig::validate() const {
  if (!(eta > 0.0)) throw ConfigError("learning rate must be positive");
  if (minibatches < 1) throw ConfigError("need at least one mini-batch");
  if (rounds < 1) throw ConfigError("need at least one round");
}

std::size_t TrainingConfig::minibatches_for(std::size_t samples) const {
  std::size_t m = batch_size > 0 ? samples / batch_size : minibatches;
  if (m > samples) m = samples;
  return m < 1 ? 1 : m;
}

}  // namespace hfcl::nn

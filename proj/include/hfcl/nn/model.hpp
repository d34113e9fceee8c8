#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "hfcl/rng.hpp"

namespace hfcl::nn {

struct Shape {
  std::size_t rows = 1;
  std::size_t cols = 1;
  std::size_t channels = 1;

  std::size_t size() const { return rows * cols * channels; }
  friend bool operator==(const Shape&, const Shape&) = default;
};

std::string to_string(const Shape& s);

enum class LayerKind { kDense, kConv2d };

enum class Activation { kIdentity, kSigmoid, kTanh, kRelu, kSoftmax };

const char* to_string(Activation a);

// One layer of a model. Dense layers are trainable; Conv2d descriptors exist
// only to count parameters of the reference CNN and cannot be evaluated.
struct LayerSpec {
  LayerKind kind = LayerKind::kDense;
  Shape input;
  Shape output;
  // Dense: output units. Conv2d: filter count.
  std::size_t units = 0;
  std::size_t kernel_rows = 0;
  std::size_t kernel_cols = 0;
  bool bias = true;
  Activation activation = Activation::kIdentity;

  // Dense: in*out weights (+ out biases). Conv2d: filters * kh * kw, the
  // filter-weight-only count used by the reference overhead figures.
  std::size_t param_count() const;
  std::string describe() const;
};

// Architecture descriptor. Parameters live in one flat vector ordered
// layer-major, weights then biases within a layer; dense weights are stored
// output-major (row o holds the weights feeding output unit o).
class ModelSpec {
 public:
  explicit ModelSpec(std::vector<LayerSpec> layers);

  // Fully connected network, widths = {input, hidden..., classes}. The last
  // layer uses `head` (softmax for classifiers).
  static ModelSpec mlp(const std::vector<std::size_t>& widths,
                       Activation hidden = Activation::kSigmoid,
                       Activation head = Activation::kSoftmax);

  // 196 -> 32 -> 10 sigmoid MLP over 14x14 downsampled images.
  static ModelSpec desk_mlp(std::size_t input_size = 196,
                            std::size_t hidden = 32,
                            std::size_t classes = 10);

  // Two valid convolutions, 5x5@128 and 3x3@128, over 28x28 inputs. Only the
  // filter weights are counted, giving P = 128 * (25 + 9) = 4352.
  static ModelSpec paper_cnn_count();

  const std::vector<LayerSpec>& layers() const { return layers_; }
  std::size_t param_count() const { return param_count_; }
  // Offset of layer i's first parameter in the flat vector.
  std::size_t offset(std::size_t layer) const { return offsets_[layer]; }
  const Shape& input_shape() const { return layers_.front().input; }
  std::size_t output_size() const { return layers_.back().output.size(); }
  // True when every layer is dense, i.e. forward/backward are defined.
  bool trainable() const;

  friend bool operator==(const ModelSpec& a, const ModelSpec& b);

 private:
  std::vector<LayerSpec> layers_;
  std::vector<std::size_t> offsets_;
  std::size_t param_count_ = 0;
};

// Flat learnable parameters theta together with their architecture.
struct ModelParams {
  std::shared_ptr<const ModelSpec> spec;
  std::vector<double> theta;

  std::size_t size() const { return theta.size(); }
  // Throws ShapeError on length mismatch and NumericError on NaN/inf.
  void validate() const;
};

// Glorot-uniform weights, zero biases.
ModelParams init_params(std::shared_ptr<const ModelSpec> spec,
                        std::uint64_t seed);
ModelParams zero_params(std::shared_ptr<const ModelSpec> spec);

enum class Provenance { kClean, kQuantized, kQuantizedNoised };

const char* to_string(Provenance p);

// Client id used for gradients computed at the parameter server.
inline constexpr int kServer = -1;

struct GradientVector {
  std::vector<double> g;
  Provenance provenance = Provenance::kClean;
  int source = kServer;

  std::size_t size() const { return g.size(); }
  double norm_squared() const;
};

enum class Loss { kCrossEntropy, kMse };

const char* to_string(Loss l);

struct TrainingConfig {
  double eta = 0.5;
  std::size_t minibatches = 1;
  // 0 means derived from the shard size and `minibatches`.
  std::size_t batch_size = 0;
  std::size_t rounds = 50;
  std::uint64_t seed = 0;
  Loss loss = Loss::kCrossEntropy;

  // Throws ConfigError unless eta > 0, minibatches >= 1 and rounds >= 1.
  void validate() const;
  // Mini-batch count for a shard of `samples`: samples / batch_size when a
  // batch size is set, otherwise `minibatches`; never more than `samples`.
  std::size_t minibatches_for(std::size_t samples) const;
};

}  // namespace hfcl::nn

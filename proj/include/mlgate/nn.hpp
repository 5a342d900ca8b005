#pragma once

// Minimal CPU training stack: NCHW convolution via im2col, max pooling,
// dense layers, element-wise activations (closed-form or gated), softmax
// with cross-entropy, Adam. Everything is seeded and single-threaded, so two
// runs with the same inputs are bit-identical.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mlgate/data.hpp"
#include "mlgate/gate.hpp"
#include "mlgate/metrics.hpp"
#include "mlgate/report.hpp"
#include "mlgate/tensor.hpp"

namespace mlgate::nn {

using Shape = std::vector<std::size_t>;

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-5;

  /// Throws std::invalid_argument outside 0 < beta < 1, lr > 0, epsilon > 0.
  void validate() const;
};

struct Activation {
  enum class Mode { BuiltIn, Gated };

  Mode mode = Mode::BuiltIn;
  gate::Preset preset = gate::Preset::ReLU;
  /// Evaluated spec for Gated mode.
  gate::GateSpec spec;
  /// Swish scale for BuiltIn mode.
  double swish_c = 1.0;
  /// Learn the scale of a NegExpScaled inner map (gated Swish family).
  bool trainable_c = false;
  /// Gated spec that matches no preset.
  bool custom = false;

  static Activation builtin(gate::Preset p, double swish_c = 1.0);
  static Activation gated(gate::Preset p, double swish_c = 1.0);
  static Activation gated(const gate::GateSpec& s);
  /// Copy with trainable_c set; throws std::invalid_argument unless the spec
  /// carries a scale.
  Activation trainable() const;

  /// "builtin:relu", "gated:sigmoid", "gated:custom".
  std::string name() const;
};

/// Parses "builtin:NAME" or "gated:NAME" with NAME a preset name.
std::optional<Activation> parse_activation(std::string_view text, double swish_c = 1.0);

template <typename T>
struct Param {
  std::string name;
  Tensor<T> value;
  Tensor<T> grad;
  /// Fan-in for He initialization; 0 marks a bias or scale (not re-drawn).
  std::size_t fan_in = 0;
};

template <typename T>
class Layer {
 public:
  virtual ~Layer() = default;
  virtual std::string name() const = 0;
  /// Per-sample output shape; throws ShapeError when `in` is incompatible.
  virtual Shape output_shape(const Shape& in) const = 0;
  /// x is N x (per-sample input shape).
  virtual Tensor<T> forward(const Tensor<T>& x) = 0;
  /// Gradient w.r.t. the last forward input; parameter gradients are
  /// accumulated.
  virtual Tensor<T> backward(const Tensor<T>& dy) = 0;
  virtual std::vector<Param<T>*> params() { return {}; }
};

template <typename T>
class Conv2d final : public Layer<T> {
 public:
  Conv2d(std::size_t in_channels, std::size_t out_channels, std::size_t kernel, std::size_t stride = 1);
  std::string name() const override;
  Shape output_shape(const Shape& in) const override;
  Tensor<T> forward(const Tensor<T>& x) override;
  Tensor<T> backward(const Tensor<T>& dy) override;
  std::vector<Param<T>*> params() override { return {&weight_, &bias_}; }

  Param<T>& weight() { return weight_; }
  Param<T>& bias() { return bias_; }

 private:
  std::size_t in_, out_, k_, stride_;
  Param<T> weight_, bias_;
  Shape in_shape_;
  std::vector<T> cols_;
};

template <typename T>
class MaxPool2d final : public Layer<T> {
 public:
  explicit MaxPool2d(std::size_t kernel, std::size_t stride = 0);
  std::string name() const override;
  Shape output_shape(const Shape& in) const override;
  Tensor<T> forward(const Tensor<T>& x) override;
  Tensor<T> backward(const Tensor<T>& dy) override;

 private:
  std::size_t k_, stride_;
  Shape in_shape_;
  std::vector<std::size_t> argmax_;
};

template <typename T>
class Dense final : public Layer<T> {
 public:
  Dense(std::size_t in_dim, std::size_t out_dim);
  std::string name() const override;
  Shape output_shape(const Shape& in) const override;
  Tensor<T> forward(const Tensor<T>& x) override;
  Tensor<T> backward(const Tensor<T>& dy) override;
  std::vector<Param<T>*> params() override { return {&weight_, &bias_}; }

  Param<T>& weight() { return weight_; }
  Param<T>& bias() { return bias_; }

 private:
  std::size_t in_, out_;
  Param<T> weight_, bias_;
  Tensor<T> x_;
};

template <typename T>
class ActivationLayer final : public Layer<T> {
 public:
  explicit ActivationLayer(Activation act);
  std::string name() const override;
  Shape output_shape(const Shape& in) const override { return in; }
  Tensor<T> forward(const Tensor<T>& x) override;
  Tensor<T> backward(const Tensor<T>& dy) override;
  std::vector<Param<T>*> params() override;

  const Activation& activation() const noexcept { return act_; }
  /// Current Swish scale for trainable layers.
  double scale() const;

 private:
  Activation act_;
  Param<T> c_;
  Tensor<T> x_;
  Tensor<T> deriv_;
};

template <typename T>
class Flatten final : public Layer<T> {
 public:
  std::string name() const override { return "flatten"; }
  Shape output_shape(const Shape& in) const override;
  Tensor<T> forward(const Tensor<T>& x) override;
  Tensor<T> backward(const Tensor<T>& dy) override;

 private:
  Shape in_shape_;
};

/// Row-wise softmax. Inside a Network its backward is fused with the loss.
template <typename T>
class Softmax final : public Layer<T> {
 public:
  std::string name() const override { return "softmax"; }
  Shape output_shape(const Shape& in) const override;
  Tensor<T> forward(const Tensor<T>& x) override;
  Tensor<T> backward(const Tensor<T>& dy) override;

 private:
  Tensor<T> y_;
};

template <typename T>
class Network {
 public:
  explicit Network(Shape input_shape);

  /// Appends a layer after checking it accepts the current output shape.
  Layer<T>& add(std::unique_ptr<Layer<T>> layer);
  template <typename L, typename... Args>
  L& emplace(Args&&... args) {
    return static_cast<L&>(add(std::make_unique<L>(std::forward<Args>(args)...)));
  }

  const Shape& input_shape() const noexcept { return input_shape_; }
  const Shape& output_shape() const noexcept { return shapes_.back(); }
  std::size_t layer_count() const noexcept { return layers_.size(); }
  Layer<T>& layer(std::size_t i) { return *layers_.at(i); }

  /// Class probabilities for a batch whose rows hold one input each. The
  /// last layer must be Softmax.
  Tensor<T> forward(const Tensor<T>& batch);
  /// Gradients of mean cross-entropy against one-hot labels for the last
  /// forward batch. Parameter gradients are overwritten.
  void backward(const Tensor<T>& labels);

  std::vector<Param<T>*> params();
  std::size_t parameter_count();
  void zero_grad();
  /// He-normal weights from a single seeded stream in layer order; biases 0.
  void init_he(std::uint64_t seed);

 private:
  Shape input_shape_;
  std::vector<Shape> shapes_;
  std::vector<std::unique_ptr<Layer<T>>> layers_;
  Tensor<T> probs_;
};

/// conv 6@5x5, act, maxpool 2, conv 16@5x5, act, maxpool 2, flatten,
/// dense 120, act, dense 84, act, dense 10, softmax on 1x28x28 inputs.
template <typename T>
Network<T> lenet5(const Activation& act, std::uint64_t seed = 1234);

/// Dense stack with an activation after every hidden layer.
template <typename T>
Network<T> mlp(std::size_t input_dim, const std::vector<std::size_t>& hidden, std::size_t classes,
               const Activation& act, std::uint64_t seed = 1234);

/// Mean over rows of -sum_k y_k ln(max(p_k, 1e-12)).
template <typename T>
double cross_entropy(const Tensor<T>& probs, const Tensor<T>& labels);

/// One scalar Adam update with bias correction; t >= 1.
void adam_update(double& w, double g, double& m, double& v, std::size_t t, const AdamConfig& cfg);

template <typename T>
class Adam {
 public:
  Adam(std::vector<Param<T>*> params, AdamConfig cfg = {});
  void step();
  std::size_t steps() const noexcept { return t_; }

 private:
  std::vector<Param<T>*> params_;
  AdamConfig cfg_;
  std::vector<std::vector<double>> m_, v_;
  std::size_t t_ = 0;
};

/// Dataset rows as a network batch (NHWC images become NCHW).
template <typename T>
Tensor<T> to_input(const Tensor<float>& images);

struct Evaluation {
  double loss = 0.0;
  metrics::ConfusionMatrix cm{1};
};

template <typename T>
Evaluation evaluate(Network<T>& net, const data::Dataset& ds, std::size_t batch_size = 500);

struct TrainConfig {
  std::size_t epochs = 10;
  std::size_t batch_size = 64;
  std::uint64_t seed = 1234;
  /// Selects an independent shuffle sequence under the same seed (ensemble
  /// members share initialization and differ here).
  std::uint64_t shuffle_stream = 0;
  AdamConfig adam;
  bool early_stop = false;
  double early_stop_delta = 0.001;
  std::size_t early_stop_patience = 10;
  /// Re-evaluate the whole training set after each epoch; otherwise the
  /// running minibatch means are reported.
  bool evaluate_train = true;
  std::size_t eval_batch = 500;
  std::function<void(const report::EpochRecord&)> on_epoch;
};

/// Seeded-shuffle minibatch training. Epoch 0 of the report is the initial
/// evaluation; macro scores are on the test set.
template <typename T>
report::RunReport train(Network<T>& net, const data::Dataset& train_set, const data::Dataset& test_set,
                        const TrainConfig& cfg);

}  // namespace mlgate::nn

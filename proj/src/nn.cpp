#include "mlgate/nn.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <random>
#include <stdexcept>

#include "mlgate/builtin.hpp"
#include "mlgate/error.hpp"

namespace mlgate::nn {

namespace {

template <typename T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MatMap = Eigen::Map<RowMat<T>>;
template <typename T>
using ConstMatMap = Eigen::Map<const RowMat<T>>;
template <typename T>
using VecMap = Eigen::Map<Eigen::Matrix<T, Eigen::Dynamic, 1>>;

std::string shape_str(const Shape& s) { return Tensor<float>::shape_string(s); }

Shape batch_shape(std::size_t n, const Shape& per_sample) {
  Shape s{n};
  s.insert(s.end(), per_sample.begin(), per_sample.end());
  return s;
}

void expect_rank(const Shape& in, std::size_t rank, const char* layer) {
  if (in.size() != rank) {
    throw ShapeError(std::string(layer) + " expects rank-" + std::to_string(rank) + " samples, got " + shape_str(in));
  }
}

template <typename T>
Param<T> make_param(std::string name, Shape shape, std::size_t fan_in) {
  Param<T> p;
  p.name = std::move(name);
  p.value = Tensor<T>(shape, T{0});
  p.grad = Tensor<T>(std::move(shape), T{0});
  p.fan_in = fan_in;
  return p;
}

Shape sample_shape(const Shape& batch) { return Shape(batch.begin() + 1, batch.end()); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

void AdamConfig::validate() const {
  if (!(lr > 0.0)) throw std::invalid_argument("Adam learning rate must be positive");
  if (!(beta1 > 0.0 && beta1 < 1.0)) throw std::invalid_argument("Adam beta1 must lie in (0, 1)");
  if (!(beta2 > 0.0 && beta2 < 1.0)) throw std::invalid_argument("Adam beta2 must lie in (0, 1)");
  if (!(epsilon > 0.0)) throw std::invalid_argument("Adam epsilon must be positive");
}

// ---- Activation ------------------------------------------------------------

Activation Activation::builtin(gate::Preset p, double swish_c) {
  Activation a;
  a.mode = Mode::BuiltIn;
  a.preset = p;
  a.swish_c = swish_c;
  a.spec = gate::preset(p, swish_c);
  return a;
}

Activation Activation::gated(gate::Preset p, double swish_c) {
  Activation a;
  a.mode = Mode::Gated;
  a.preset = p;
  a.swish_c = swish_c;
  a.spec = gate::preset(p, swish_c);
  return a;
}

Activation Activation::gated(const gate::GateSpec& s) {
  s.validate();
  Activation a;
  a.mode = Mode::Gated;
  a.spec = s;
  a.swish_c = s.f.carries_scale() ? s.f.c : 1.0;
  bool matched = false;
  for (gate::Preset p : gate::all_presets()) {
    if (gate::preset(p, a.swish_c) == s) {
      a.preset = p;
      matched = true;
      break;
    }
  }
  a.custom = !matched;
  return a;
}

Activation Activation::trainable() const {
  if (mode != Mode::Gated || !spec.f.carries_scale()) {
    throw std::invalid_argument("only gated activations with a scaled exponential map have a trainable scale");
  }
  Activation a = *this;
  a.trainable_c = true;
  return a;
}

std::string Activation::name() const {
  if (mode == Mode::BuiltIn) return std::string("builtin:") + gate::to_string(preset);
  if (custom) return "gated:custom";
  return std::string("gated:") + gate::to_string(preset);
}

std::optional<Activation> parse_activation(std::string_view text, double swish_c) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) return std::nullopt;
  const auto mode = text.substr(0, colon);
  const auto id = gate::parse_preset(text.substr(colon + 1));
  if (!id) return std::nullopt;
  if (mode == "builtin") return Activation::builtin(*id, swish_c);
  if (mode == "gated") return Activation::gated(*id, swish_c);
  return std::nullopt;
}

// ---- Conv2d ----------------------------------------------------------------

template <typename T>
Conv2d<T>::Conv2d(std::size_t in_channels, std::size_t out_channels, std::size_t kernel, std::size_t stride)
    : in_(in_channels), out_(out_channels), k_(kernel), stride_(stride) {
  if (in_ == 0 || out_ == 0 || k_ == 0 || stride_ == 0) throw ShapeError("conv2d extents must be positive");
  weight_ = make_param<T>("weight", {out_, in_, k_, k_}, in_ * k_ * k_);
  bias_ = make_param<T>("bias", {out_}, 0);
}

template <typename T>
std::string Conv2d<T>::name() const {
  return "conv2d(" + std::to_string(out_) + "@" + std::to_string(k_) + "x" + std::to_string(k_) + ")";
}

template <typename T>
Shape Conv2d<T>::output_shape(const Shape& in) const {
  expect_rank(in, 3, "conv2d");
  if (in[0] != in_ || in[1] < k_ || in[2] < k_) {
    throw ShapeError("conv2d with " + std::to_string(in_) + " channels and kernel " + std::to_string(k_) +
                     " cannot take " + shape_str(in));
  }
  return {out_, (in[1] - k_) / stride_ + 1, (in[2] - k_) / stride_ + 1};
}

template <typename T>
Tensor<T> Conv2d<T>::forward(const Tensor<T>& x) {
  in_shape_ = x.shape();
  const Shape os = output_shape(sample_shape(in_shape_));
  const std::size_t n = in_shape_[0], h = in_shape_[2], w = in_shape_[3];
  const std::size_t ho = os[1], wo = os[2], p = ho * wo, np = n * p, kk = k_ * k_, ckk = in_ * kk;

  cols_.resize(ckk * np);
  for (std::size_t b = 0; b < n; ++b) {
    for (std::size_t c = 0; c < in_; ++c) {
      const T* plane = x.data() + (b * in_ + c) * h * w;
      for (std::size_t ki = 0; ki < k_; ++ki) {
        for (std::size_t kj = 0; kj < k_; ++kj) {
          T* dst = cols_.data() + (c * kk + ki * k_ + kj) * np + b * p;
          for (std::size_t oh = 0; oh < ho; ++oh) {
            const T* src = plane + (oh * stride_ + ki) * w + kj;
            T* row = dst + oh * wo;
            for (std::size_t ow = 0; ow < wo; ++ow) row[ow] = src[ow * stride_];
          }
        }
      }
    }
  }

  RowMat<T> out(out_, np);
  out.noalias() = ConstMatMap<T>(weight_.value.data(), out_, ckk) * ConstMatMap<T>(cols_.data(), ckk, np);
  Tensor<T> y(batch_shape(n, os));
  for (std::size_t b = 0; b < n; ++b) {
    for (std::size_t o = 0; o < out_; ++o) {
      const T bias = bias_.value[o];
      const T* src = out.data() + o * np + b * p;
      T* dst = y.data() + (b * out_ + o) * p;
      for (std::size_t i = 0; i < p; ++i) dst[i] = src[i] + bias;
    }
  }
  return y;
}

template <typename T>
Tensor<T> Conv2d<T>::backward(const Tensor<T>& dy) {
  const std::size_t n = in_shape_[0], h = in_shape_[2], w = in_shape_[3];
  const Shape os = output_shape(sample_shape(in_shape_));
  const std::size_t ho = os[1], wo = os[2], p = ho * wo, np = n * p, kk = k_ * k_, ckk = in_ * kk;
  if (dy.size() != n * out_ * p) throw ShapeError("conv2d backward got " + shape_str(dy.shape()));

  RowMat<T> g(out_, np);
  for (std::size_t b = 0; b < n; ++b) {
    for (std::size_t o = 0; o < out_; ++o) {
      std::memcpy(g.data() + o * np + b * p, dy.data() + (b * out_ + o) * p, p * sizeof(T));
    }
  }
  const ConstMatMap<T> cols(cols_.data(), ckk, np);
  MatMap<T>(weight_.grad.data(), out_, ckk).noalias() += g * cols.transpose();
  VecMap<T>(bias_.grad.data(), out_) += g.rowwise().sum();

  RowMat<T> dcols(ckk, np);
  dcols.noalias() = ConstMatMap<T>(weight_.value.data(), out_, ckk).transpose() * g;

  Tensor<T> dx(in_shape_, T{0});
  for (std::size_t b = 0; b < n; ++b) {
    for (std::size_t c = 0; c < in_; ++c) {
      T* plane = dx.data() + (b * in_ + c) * h * w;
      for (std::size_t ki = 0; ki < k_; ++ki) {
        for (std::size_t kj = 0; kj < k_; ++kj) {
          const T* src = dcols.data() + (c * kk + ki * k_ + kj) * np + b * p;
          for (std::size_t oh = 0; oh < ho; ++oh) {
            T* row = plane + (oh * stride_ + ki) * w + kj;
            const T* s = src + oh * wo;
            for (std::size_t ow = 0; ow < wo; ++ow) row[ow * stride_] += s[ow];
          }
        }
      }
    }
  }
  return dx;
}

// ---- MaxPool2d -------------------------------------------------------------

template <typename T>
MaxPool2d<T>::MaxPool2d(std::size_t kernel, std::size_t stride) : k_(kernel), stride_(stride == 0 ? kernel : stride) {
  if (k_ == 0) throw ShapeError("pooling kernel must be positive");
}

template <typename T>
std::string MaxPool2d<T>::name() const {
  return "maxpool(" + std::to_string(k_) + ")";
}

template <typename T>
Shape MaxPool2d<T>::output_shape(const Shape& in) const {
  expect_rank(in, 3, "maxpool");
  if (in[1] < k_ || in[2] < k_) throw ShapeError("maxpool window larger than input " + shape_str(in));
  return {in[0], (in[1] - k_) / stride_ + 1, (in[2] - k_) / stride_ + 1};
}

template <typename T>
Tensor<T> MaxPool2d<T>::forward(const Tensor<T>& x) {
  in_shape_ = x.shape();
  const Shape os = output_shape(sample_shape(in_shape_));
  const std::size_t planes = in_shape_[0] * in_shape_[1], h = in_shape_[2], w = in_shape_[3];
  const std::size_t ho = os[1], wo = os[2];
  Tensor<T> y(batch_shape(in_shape_[0], os));
  argmax_.resize(y.size());
  std::size_t out = 0;
  for (std::size_t pl = 0; pl < planes; ++pl) {
    const std::size_t base = pl * h * w;
    for (std::size_t oh = 0; oh < ho; ++oh) {
      for (std::size_t ow = 0; ow < wo; ++ow, ++out) {
        std::size_t best = base + oh * stride_ * w + ow * stride_;
        for (std::size_t i = 0; i < k_; ++i) {
          for (std::size_t j = 0; j < k_; ++j) {
            const std::size_t idx = base + (oh * stride_ + i) * w + ow * stride_ + j;
            if (x[idx] > x[best]) best = idx;
          }
        }
        argmax_[out] = best;
        y[out] = x[best];
      }
    }
  }
  return y;
}

template <typename T>
Tensor<T> MaxPool2d<T>::backward(const Tensor<T>& dy) {
  if (dy.size() != argmax_.size()) throw ShapeError("maxpool backward got " + shape_str(dy.shape()));
  Tensor<T> dx(in_shape_, T{0});
  for (std::size_t i = 0; i < argmax_.size(); ++i) dx[argmax_[i]] += dy[i];
  return dx;
}

// ---- Dense -----------------------------------------------------------------

template <typename T>
Dense<T>::Dense(std::size_t in_dim, std::size_t out_dim) : in_(in_dim), out_(out_dim) {
  if (in_ == 0 || out_ == 0) throw ShapeError("dense extents must be positive");
  weight_ = make_param<T>("weight", {out_, in_}, in_);
  bias_ = make_param<T>("bias", {out_}, 0);
}

template <typename T>
std::string Dense<T>::name() const {
  return "dense(" + std::to_string(out_) + ")";
}

template <typename T>
Shape Dense<T>::output_shape(const Shape& in) const {
  expect_rank(in, 1, "dense");
  if (in[0] != in_) throw ShapeError("dense expects " + std::to_string(in_) + " inputs, got " + shape_str(in));
  return {out_};
}

template <typename T>
Tensor<T> Dense<T>::forward(const Tensor<T>& x) {
  output_shape(sample_shape(x.shape()));
  x_ = x;
  const std::size_t n = x.dim(0);
  Tensor<T> y({n, out_});
  MatMap<T> ym(y.data(), n, out_);
  ym.noalias() = ConstMatMap<T>(x.data(), n, in_) * ConstMatMap<T>(weight_.value.data(), out_, in_).transpose();
  ym.rowwise() += VecMap<T>(bias_.value.data(), out_).transpose();
  return y;
}

template <typename T>
Tensor<T> Dense<T>::backward(const Tensor<T>& dy) {
  const std::size_t n = x_.dim(0);
  if (dy.size() != n * out_) throw ShapeError("dense backward got " + shape_str(dy.shape()));
  const ConstMatMap<T> g(dy.data(), n, out_);
  MatMap<T>(weight_.grad.data(), out_, in_).noalias() += g.transpose() * ConstMatMap<T>(x_.data(), n, in_);
  VecMap<T>(bias_.grad.data(), out_) += g.colwise().sum().transpose();
  Tensor<T> dx({n, in_});
  MatMap<T>(dx.data(), n, in_).noalias() = g * ConstMatMap<T>(weight_.value.data(), out_, in_);
  return dx;
}

// ---- ActivationLayer -------------------------------------------------------

template <typename T>
ActivationLayer<T>::ActivationLayer(Activation act) : act_(std::move(act)) {
  if (act_.mode == Activation::Mode::Gated) act_.spec.validate();
  if (act_.trainable_c) {
    c_ = make_param<T>("c", {1}, 0);
    c_.value[0] = static_cast<T>(act_.spec.f.c);
  }
}

template <typename T>
std::string ActivationLayer<T>::name() const {
  return act_.name() + (act_.trainable_c ? "(trainable c)" : "");
}

template <typename T>
double ActivationLayer<T>::scale() const {
  return act_.trainable_c ? static_cast<double>(c_.value[0]) : act_.spec.f.c;
}

template <typename T>
std::vector<Param<T>*> ActivationLayer<T>::params() {
  if (act_.trainable_c) return {&c_};
  return {};
}

template <typename T>
Tensor<T> ActivationLayer<T>::forward(const Tensor<T>& x) {
  Tensor<T> y(x.shape());
  deriv_ = Tensor<T>(x.shape());
  const std::size_t n = x.size();
  if (act_.mode == Activation::Mode::BuiltIn) {
    for (std::size_t i = 0; i < n; ++i) {
      const double v = static_cast<double>(x[i]);
      y[i] = static_cast<T>(builtin::value(act_.preset, v, act_.swish_c));
      deriv_[i] = static_cast<T>(builtin::deriv(act_.preset, v, act_.swish_c));
    }
    return y;
  }
  gate::GateSpec spec = act_.spec;
  if (act_.trainable_c) {
    spec.f.c = static_cast<double>(c_.value[0]);
    x_ = x;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto gv = gate::gate_eval_deriv(spec, static_cast<double>(x[i]));
    y[i] = static_cast<T>(gv.value);
    deriv_[i] = static_cast<T>(gv.deriv);
  }
  return y;
}

template <typename T>
Tensor<T> ActivationLayer<T>::backward(const Tensor<T>& dy) {
  if (dy.size() != deriv_.size()) throw ShapeError("activation backward got " + shape_str(dy.shape()));
  Tensor<T> dx(dy.shape());
  for (std::size_t i = 0; i < dy.size(); ++i) dx[i] = dy[i] * deriv_[i];
  if (act_.trainable_c) {
    gate::GateSpec spec = act_.spec;
    spec.f.c = static_cast<double>(c_.value[0]);
    double dc = 0.0;
    for (std::size_t i = 0; i < dy.size(); ++i) {
      dc += static_cast<double>(dy[i]) * gate::gate_deriv_param_c(spec, static_cast<double>(x_[i]));
    }
    c_.grad[0] += static_cast<T>(dc);
  }
  return dx;
}

// ---- Flatten / Softmax -----------------------------------------------------

template <typename T>
Shape Flatten<T>::output_shape(const Shape& in) const {
  return {Tensor<T>::element_count(in)};
}

template <typename T>
Tensor<T> Flatten<T>::forward(const Tensor<T>& x) {
  in_shape_ = x.shape();
  Tensor<T> y = x;
  y.reshape({x.dim(0), x.row_size()});
  return y;
}

template <typename T>
Tensor<T> Flatten<T>::backward(const Tensor<T>& dy) {
  Tensor<T> dx = dy;
  dx.reshape(in_shape_);
  return dx;
}

template <typename T>
Shape Softmax<T>::output_shape(const Shape& in) const {
  expect_rank(in, 1, "softmax");
  return in;
}

template <typename T>
Tensor<T> Softmax<T>::forward(const Tensor<T>& x) {
  const std::size_t n = x.dim(0), k = x.row_size();
  y_ = Tensor<T>(x.shape());
  std::vector<double> e(k);
  for (std::size_t r = 0; r < n; ++r) {
    const T* row = x.data() + r * k;
    const double mx = static_cast<double>(*std::max_element(row, row + k));
    double sum = 0.0;
    for (std::size_t j = 0; j < k; ++j) sum += e[j] = std::exp(static_cast<double>(row[j]) - mx);
    for (std::size_t j = 0; j < k; ++j) y_[r * k + j] = static_cast<T>(e[j] / sum);
  }
  return y_;
}

template <typename T>
Tensor<T> Softmax<T>::backward(const Tensor<T>& dy) {
  const std::size_t n = y_.dim(0), k = y_.row_size();
  Tensor<T> dx(y_.shape());
  for (std::size_t r = 0; r < n; ++r) {
    double dot = 0.0;
    for (std::size_t j = 0; j < k; ++j) dot += static_cast<double>(dy[r * k + j]) * static_cast<double>(y_[r * k + j]);
    for (std::size_t j = 0; j < k; ++j) {
      dx[r * k + j] = static_cast<T>(static_cast<double>(y_[r * k + j]) * (static_cast<double>(dy[r * k + j]) - dot));
    }
  }
  return dx;
}

// ---- Network ---------------------------------------------------------------

template <typename T>
Network<T>::Network(Shape input_shape) : input_shape_(std::move(input_shape)) {
  if (input_shape_.empty() || Tensor<T>::element_count(input_shape_) == 0) {
    throw ShapeError("network input shape must be nonempty");
  }
  shapes_.push_back(input_shape_);
}

template <typename T>
Layer<T>& Network<T>::add(std::unique_ptr<Layer<T>> layer) {
  shapes_.push_back(layer->output_shape(shapes_.back()));
  layers_.push_back(std::move(layer));
  return *layers_.back();
}

template <typename T>
Tensor<T> Network<T>::forward(const Tensor<T>& batch) {
  if (layers_.empty() || dynamic_cast<Softmax<T>*>(layers_.back().get()) == nullptr) {
    throw ShapeError("network must end in a softmax layer");
  }
  if (batch.rank() == 0 || batch.row_size() != Tensor<T>::element_count(input_shape_)) {
    throw ShapeError("batch " + shape_str(batch.shape()) + " does not match network input " + shape_str(input_shape_));
  }
  Tensor<T> x = batch;
  x.reshape(batch_shape(batch.dim(0), input_shape_));
  for (auto& layer : layers_) x = layer->forward(x);
  probs_ = x;
  return x;
}

template <typename T>
void Network<T>::backward(const Tensor<T>& labels) {
  if (probs_.empty()) throw ShapeError("backward called before forward");
  if (labels.shape() != probs_.shape()) {
    throw ShapeError("labels " + shape_str(labels.shape()) + " do not match outputs " + shape_str(probs_.shape()));
  }
  zero_grad();
  const T inv_n = T{1} / static_cast<T>(probs_.dim(0));
  Tensor<T> g(probs_.shape());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = (probs_[i] - labels[i]) * inv_n;
  for (std::size_t i = layers_.size() - 1; i-- > 0;) g = layers_[i]->backward(g);
}

template <typename T>
std::vector<Param<T>*> Network<T>::params() {
  std::vector<Param<T>*> out;
  for (auto& layer : layers_) {
    for (Param<T>* p : layer->params()) out.push_back(p);
  }
  return out;
}

template <typename T>
std::size_t Network<T>::parameter_count() {
  std::size_t n = 0;
  for (Param<T>* p : params()) n += p->value.size();
  return n;
}

template <typename T>
void Network<T>::zero_grad() {
  for (Param<T>* p : params()) std::fill(p->grad.values().begin(), p->grad.values().end(), T{0});
}

template <typename T>
void Network<T>::init_he(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Param<T>* p : params()) {
    if (p->fan_in == 0) {
      if (p->name == "bias") std::fill(p->value.values().begin(), p->value.values().end(), T{0});
      continue;
    }
    const double sd = std::sqrt(2.0 / static_cast<double>(p->fan_in));
    for (T& v : p->value.values()) v = static_cast<T>(sd * normal(rng));
  }
}

template <typename T>
Network<T> lenet5(const Activation& act, std::uint64_t seed) {
  Network<T> net({1, 28, 28});
  net.template emplace<Conv2d<T>>(1, 6, 5);
  net.template emplace<ActivationLayer<T>>(act);
  net.template emplace<MaxPool2d<T>>(2);
  net.template emplace<Conv2d<T>>(6, 16, 5);
  net.template emplace<ActivationLayer<T>>(act);
  net.template emplace<MaxPool2d<T>>(2);
  net.template emplace<Flatten<T>>();
  net.template emplace<Dense<T>>(256, 120);
  net.template emplace<ActivationLayer<T>>(act);
  net.template emplace<Dense<T>>(120, 84);
  net.template emplace<ActivationLayer<T>>(act);
  net.template emplace<Dense<T>>(84, 10);
  net.template emplace<Softmax<T>>();
  net.init_he(seed);
  return net;
}

template <typename T>
Network<T> mlp(std::size_t input_dim, const std::vector<std::size_t>& hidden, std::size_t classes,
               const Activation& act, std::uint64_t seed) {
  Network<T> net({input_dim});
  std::size_t prev = input_dim;
  for (std::size_t h : hidden) {
    net.template emplace<Dense<T>>(prev, h);
    net.template emplace<ActivationLayer<T>>(act);
    prev = h;
  }
  net.template emplace<Dense<T>>(prev, classes);
  net.template emplace<Softmax<T>>();
  net.init_he(seed);
  return net;
}

template <typename T>
double cross_entropy(const Tensor<T>& probs, const Tensor<T>& labels) {
  if (probs.shape() != labels.shape() || probs.rank() != 2) {
    throw ShapeError("cross_entropy shapes " + shape_str(probs.shape()) + " and " + shape_str(labels.shape()));
  }
  double total = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (labels[i] != T{0}) {
      total -= static_cast<double>(labels[i]) * std::log(std::max(static_cast<double>(probs[i]), 1e-12));
    }
  }
  return total / static_cast<double>(probs.dim(0));
}

void adam_update(double& w, double g, double& m, double& v, std::size_t t, const AdamConfig& cfg) {
  m = cfg.beta1 * m + (1.0 - cfg.beta1) * g;
  v = cfg.beta2 * v + (1.0 - cfg.beta2) * g * g;
  const double td = static_cast<double>(t);
  const double m_hat = m / (1.0 - std::pow(cfg.beta1, td));
  const double v_hat = v / (1.0 - std::pow(cfg.beta2, td));
  w -= cfg.lr * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
}

template <typename T>
Adam<T>::Adam(std::vector<Param<T>*> params, AdamConfig cfg) : params_(std::move(params)), cfg_(cfg) {
  cfg_.validate();
  for (Param<T>* p : params_) {
    m_.emplace_back(p->value.size(), 0.0);
    v_.emplace_back(p->value.size(), 0.0);
  }
}

template <typename T>
void Adam<T>::step() {
  ++t_;
  for (std::size_t j = 0; j < params_.size(); ++j) {
    Param<T>& p = *params_[j];
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      double w = static_cast<double>(p.value[i]);
      adam_update(w, static_cast<double>(p.grad[i]), m_[j][i], v_[j][i], t_, cfg_);
      p.value[i] = static_cast<T>(w);
    }
  }
}

template <typename T>
Tensor<T> to_input(const Tensor<float>& images) {
  if (images.rank() != 4) return images.cast<T>();
  const std::size_t n = images.dim(0), h = images.dim(1), w = images.dim(2), c = images.dim(3);
  Tensor<T> out({n, c, h, w});
  for (std::size_t b = 0; b < n; ++b)
    for (std::size_t y = 0; y < h; ++y)
      for (std::size_t x = 0; x < w; ++x)
        for (std::size_t ch = 0; ch < c; ++ch)
          out[((b * c + ch) * h + y) * w + x] = static_cast<T>(images[((b * h + y) * w + x) * c + ch]);
  return out;
}

namespace {

template <typename T>
std::size_t argmax_row(const T* row, std::size_t k) {
  return static_cast<std::size_t>(std::max_element(row, row + k) - row);
}

}  // namespace

template <typename T>
Evaluation evaluate(Network<T>& net, const data::Dataset& ds, std::size_t batch_size) {
  const std::size_t n = ds.size(), k = ds.classes();
  Evaluation ev{0.0, metrics::ConfusionMatrix(std::max<std::size_t>(k, 1))};
  std::vector<std::size_t> rows;
  for (std::size_t start = 0; start < n; start += batch_size) {
    const std::size_t end = std::min(start + batch_size, n);
    rows.resize(end - start);
    for (std::size_t i = start; i < end; ++i) rows[i - start] = i;
    const data::Dataset part = data::gather(ds, rows);
    const Tensor<T> probs = net.forward(to_input<T>(part.images));
    ev.loss += cross_entropy(probs, part.labels.cast<T>()) * static_cast<double>(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      ev.cm.add(argmax_row(part.labels.data() + r * k, k), argmax_row(probs.data() + r * k, k));
    }
  }
  if (n > 0) ev.loss /= static_cast<double>(n);
  return ev;
}

template <typename T>
report::RunReport train(Network<T>& net, const data::Dataset& train_set, const data::Dataset& test_set,
                        const TrainConfig& cfg) {
  if (train_set.size() == 0) throw std::invalid_argument("training set is empty");
  if (cfg.batch_size == 0) throw std::invalid_argument("batch size must be at least 1");
  const auto run_start = std::chrono::steady_clock::now();

  report::RunReport rep;
  rep.seed = cfg.seed;

  auto record_for = [&](std::size_t epoch, const Evaluation& tr, const Evaluation& te) {
    report::EpochRecord r;
    r.epoch = epoch;
    r.train_loss = tr.loss;
    r.train_acc = metrics::accuracy(tr.cm);
    r.test_loss = te.loss;
    r.test_acc = test_set.size() ? metrics::accuracy(te.cm) : 0.0;
    const auto m = metrics::macro_prf(test_set.size() ? te.cm : tr.cm);
    r.macro_p = m.precision;
    r.macro_r = m.recall;
    r.macro_f1 = m.f1;
    return r;
  };

  {
    const Evaluation tr = evaluate(net, train_set, cfg.eval_batch);
    const Evaluation te = evaluate(net, test_set, cfg.eval_batch);
    rep.epochs.push_back(record_for(0, tr, te));
    if (cfg.on_epoch) cfg.on_epoch(rep.epochs.back());
  }

  Adam<T> opt(net.params(), cfg.adam);
  std::vector<double> f1_history;
  double train_seconds = 0.0;
  std::size_t images_seen = 0;
  const std::size_t k = train_set.classes();

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const auto epoch_start = std::chrono::steady_clock::now();
    const data::Batches batches(train_set, cfg.batch_size, data::derive_seed(cfg.seed, (cfg.shuffle_stream << 32) + epoch));
    Evaluation running{0.0, metrics::ConfusionMatrix(k)};
    for (std::size_t b = 0; b < batches.size(); ++b) {
      const data::Dataset batch = batches[b];
      const Tensor<T> labels = batch.labels.cast<T>();
      const Tensor<T> probs = net.forward(to_input<T>(batch.images));
      running.loss += cross_entropy(probs, labels) * static_cast<double>(batch.size());
      for (std::size_t r = 0; r < batch.size(); ++r) {
        running.cm.add(argmax_row(batch.labels.data() + r * k, k), argmax_row(probs.data() + r * k, k));
      }
      net.backward(labels);
      opt.step();
    }
    running.loss /= static_cast<double>(train_set.size());
    const double epoch_train_seconds = seconds_since(epoch_start);
    train_seconds += epoch_train_seconds;
    images_seen += train_set.size();

    const Evaluation tr = cfg.evaluate_train ? evaluate(net, train_set, cfg.eval_batch) : std::move(running);
    const Evaluation te = evaluate(net, test_set, cfg.eval_batch);
    report::EpochRecord r = record_for(epoch, tr, te);
    r.wall_seconds = seconds_since(epoch_start);
    r.images_per_second = static_cast<double>(train_set.size()) / epoch_train_seconds;
    rep.epochs.push_back(r);
    if (cfg.on_epoch) cfg.on_epoch(r);

    f1_history.push_back(r.macro_f1);
    if (cfg.early_stop && metrics::f1_early_stop(f1_history, cfg.early_stop_delta, cfg.early_stop_patience)) {
      rep.early_stopped = true;
      break;
    }
  }

  rep.wall_clock_seconds = seconds_since(run_start);
  rep.images_per_second = train_seconds > 0.0 ? static_cast<double>(images_seen) / train_seconds : 0.0;
  return rep;
}

#define MLGATE_INSTANTIATE(T)                                                                                   \
  template class Conv2d<T>;                                                                                     \
  template class MaxPool2d<T>;                                                                                  \
  template class Dense<T>;                                                                                      \
  template class ActivationLayer<T>;                                                                            \
  template class Flatten<T>;                                                                                    \
  template class Softmax<T>;                                                                                    \
  template class Network<T>;                                                                                    \
  template class Adam<T>;                                                                                       \
  template Network<T> lenet5<T>(const Activation&, std::uint64_t);                                              \
  template Network<T> mlp<T>(std::size_t, const std::vector<std::size_t>&, std::size_t, const Activation&,      \
                             std::uint64_t);                                                                    \
  template double cross_entropy<T>(const Tensor<T>&, const Tensor<T>&);                                         \
  template Tensor<T> to_input<T>(const Tensor<float>&);                                                         \
  template Evaluation evaluate<T>(Network<T>&, const data::Dataset&, std::size_t);                              \
  template report::RunReport train<T>(Network<T>&, const data::Dataset&, const data::Dataset&, const TrainConfig&);

MLGATE_INSTANTIATE(float)
MLGATE_INSTANTIATE(double)

#undef MLGATE_INSTANTIATE

}  // namespace mlgate::nn

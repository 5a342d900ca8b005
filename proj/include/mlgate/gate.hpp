#pragma once

// Gated activation functional
//
//   a(x) = s * x * u^{gamma-1} * E_{a1,b1}(f(u)) / E_{a2,b2}(g(u)),   u = T(x)
//
// where T is the input transform and s the output scale. With the identity
// transform the prefactor is u^gamma. Nine classical activations are
// parameterizations of this form (see preset()).
//
// Note on GELU: the usual parameter table omits the 1/2 prefactor of
// (x/2)(1 + erf(x/sqrt 2)); it is carried by output_scale here.

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "mlgate/mlf.hpp"

namespace mlgate::gate {

using mlf::MlfParams;

/// Inner maps f, g. Exponentials saturate at e^709 so every map stays finite.
struct ArgFn {
  enum class Kind {
    Zero,          // 0
    NegExpScaled,  // -e^{-c x}
    PosExp,        // e^{-x}
    NegAbs,        // -|x|
    Square,        // x^2
    ScaledLinear,  // c x
    ScaledSquare,  // c x^2
  };

  Kind kind = Kind::Zero;
  double c = 1.0;

  static ArgFn zero() { return {Kind::Zero, 0.0}; }
  static ArgFn neg_exp_scaled(double c) { return {Kind::NegExpScaled, c}; }
  static ArgFn pos_exp() { return {Kind::PosExp, 1.0}; }
  static ArgFn neg_abs() { return {Kind::NegAbs, 1.0}; }
  static ArgFn square() { return {Kind::Square, 1.0}; }
  static ArgFn scaled_linear(double c) { return {Kind::ScaledLinear, c}; }
  static ArgFn scaled_square(double c) { return {Kind::ScaledSquare, c}; }

  double eval(double x) const noexcept;
  /// d/dx; the NegAbs subgradient at 0 is 0.
  double deriv(double x) const noexcept;
  /// True for maps whose scale c is a trainable parameter (NegExpScaled).
  bool carries_scale() const noexcept { return kind == Kind::NegExpScaled; }
  /// d/dc of a NegExpScaled map; 0 for every other kind.
  double deriv_c(double x) const noexcept;

  friend bool operator==(const ArgFn&, const ArgFn&) = default;
};

struct InputTransform {
  enum class Kind { Identity, Scale, Softplus };

  Kind kind = Kind::Identity;
  double c = 1.0;

  static InputTransform identity() { return {Kind::Identity, 1.0}; }
  static InputTransform scale(double c) { return {Kind::Scale, c}; }
  static InputTransform softplus() { return {Kind::Softplus, 1.0}; }

  double eval(double x) const noexcept;
  double deriv(double x) const noexcept;

  friend bool operator==(const InputTransform&, const InputTransform&) = default;
};

enum class NegativeBranch { Gate, Zero };

struct GateSpec {
  double gamma = 1.0;
  MlfParams num{1.0, 1.0};
  MlfParams den{1.0, 1.0};
  ArgFn f = ArgFn::zero();
  ArgFn g = ArgFn::zero();
  InputTransform transform = InputTransform::identity();
  double output_scale = 1.0;
  NegativeBranch negative_branch = NegativeBranch::Gate;

  /// Throws MathError(Domain) when gamma < 0, an order is negative or the
  /// output scale is not positive.
  void validate() const;

  friend bool operator==(const GateSpec&, const GateSpec&) = default;
};

enum class Preset {
  ReLU,
  Sigmoid,
  Swish,
  Softsign,
  Tanh,
  Mish,
  BipolarSigmoidA,
  BipolarSigmoidB,
  GELU,
};

/// All presets in catalog order.
std::span<const Preset> all_presets() noexcept;

const char* to_string(Preset id) noexcept;

/// Case-insensitive lookup; accepts the names produced by to_string and the
/// aliases "swish1", "bipolar" (A form) and "bipolar-a"/"bipolar-b".
std::optional<Preset> parse_preset(std::string_view name);

/// Catalog entry. swish_c is used only by Preset::Swish.
GateSpec preset(Preset id, double swish_c = 1.0);

struct GateValue {
  double value;
  double deriv;
};

double gate_eval(const GateSpec& s, double x);

/// da/dx. Throws Singularity at u = 0 when the power rule blows up
/// (0 < gamma < 1).
double gate_deriv(const GateSpec& s, double x);

/// Value and derivative sharing a single pair of Mittag-Leffler evaluations.
GateValue gate_eval_deriv(const GateSpec& s, double x);

/// da/dc through f for specs whose f is NegExpScaled (the Swish family).
/// Throws UnsupportedParameter otherwise.
double gate_deriv_param_c(const GateSpec& s, double x);

/// x * E_{2,2}(x^2) / E_{2,beta2}(x^2): linear at beta2 = 2, tanh at beta2 = 1.
GateSpec tanh_interpolation_spec(double beta2);

struct SweepTable {
  std::vector<double> beta2;
  std::vector<double> xs;
  /// Row-major, one row per beta2 value.
  std::vector<double> values;

  double at(std::size_t beta_index, std::size_t x_index) const {
    return values[beta_index * xs.size() + x_index];
  }
};

/// Evaluates tanh_interpolation_spec(b) on xs for every b. Requires every
/// b in [1, 2] and |x| <= 25.
SweepTable interpolation_sweep(std::span<const double> beta2_values, std::span<const double> xs);

}  // namespace mlgate::gate

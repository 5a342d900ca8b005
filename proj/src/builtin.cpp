#include "mlgate/builtin.hpp"

#include <cmath>
#include <numbers>

#include "mlgate/special.hpp"

namespace mlgate::builtin {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

double value(gate::Preset id, double x, double swish_c) {
  using gate::Preset;
  switch (id) {
    case Preset::ReLU: return x > 0.0 ? x : 0.0;
    case Preset::Sigmoid: return sigmoid(x);
    case Preset::Swish: return x * sigmoid(swish_c * x);
    case Preset::Softsign: return x / (1.0 + std::abs(x));
    case Preset::Tanh: return std::tanh(x);
    case Preset::Mish: return x * std::tanh(special::softplus(x));
    case Preset::BipolarSigmoidA:
    case Preset::BipolarSigmoidB: return std::tanh(0.5 * x);
    case Preset::GELU: return 0.5 * x * (1.0 + special::erf(x / std::numbers::sqrt2));
  }
  return 0.0;
}

double deriv(gate::Preset id, double x, double swish_c) {
  using gate::Preset;
  switch (id) {
    case Preset::ReLU: return x > 0.0 ? 1.0 : 0.0;
    case Preset::Sigmoid: {
      const double s = sigmoid(x);
      return s * (1.0 - s);
    }
    case Preset::Swish: {
      const double s = sigmoid(swish_c * x);
      return s + swish_c * x * s * (1.0 - s);
    }
    case Preset::Softsign: {
      const double d = 1.0 + std::abs(x);
      return 1.0 / (d * d);
    }
    case Preset::Tanh: {
      const double t = std::tanh(x);
      return 1.0 - t * t;
    }
    case Preset::Mish: {
      const double t = std::tanh(special::softplus(x));
      return t + x * (1.0 - t * t) * sigmoid(x);
    }
    case Preset::BipolarSigmoidA:
    case Preset::BipolarSigmoidB: {
      const double t = std::tanh(0.5 * x);
      return 0.5 * (1.0 - t * t);
    }
    case Preset::GELU: {
      const double phi = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
      return 0.5 * (1.0 + special::erf(x / std::numbers::sqrt2)) + x * phi;
    }
  }
  return 0.0;
}

}  // namespace mlgate::builtin

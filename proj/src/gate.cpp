#include "mlgate/gate.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <numbers>
#include <string>

#include "mlgate/error.hpp"
#include "mlgate/special.hpp"

namespace mlgate::gate {

namespace {

constexpr double kExpCeiling = 709.0;
// Beyond this |u| the tanh gate is evaluated as tanh(u)/u directly.
constexpr double kTanhRatioSwitch = 25.0;

double saturating_exp(double arg) { return std::exp(std::min(arg, kExpCeiling)); }

struct Ratio {
  double r;
  double dr;  // dR/du
};

bool is_tanh_pair(const GateSpec& s) {
  return s.num == MlfParams{2.0, 2.0} && s.den == MlfParams{2.0, 1.0} &&
         s.f.kind == ArgFn::Kind::Square && s.g.kind == ArgFn::Kind::Square;
}

bool is_erf_pair(const GateSpec& s) {
  if (!(s.num == MlfParams{0.5, 1.0} && s.den == MlfParams{1.0, 1.0})) return false;
  if (s.f.kind != ArgFn::Kind::ScaledLinear || s.g.kind != ArgFn::Kind::ScaledSquare) return false;
  return std::abs(s.g.c - s.f.c * s.f.c) <= 1e-15 * std::abs(s.g.c);
}

// tanh(u)/u; |u| is large whenever this is used.
Ratio tanh_ratio(double u) {
  const double t = std::tanh(u);
  const double sech2 = 1.0 - t * t;
  return {t / u, (u * sech2 - t) / (u * u)};
}

// E_{1/2,1}(c u) / E_{1,1}(c^2 u^2) = erfc(-c u)
Ratio erf_ratio(double c, double u) {
  const double z = c * u;
  return {special::erfc(-z), c * 2.0 / std::sqrt(std::numbers::pi) * std::exp(-z * z)};
}

Ratio gate_ratio(const GateSpec& s, double u, bool need_deriv) {
  if (s.num == s.den && s.f == s.g) return {1.0, 0.0};

  const double fu = s.f.eval(u);
  const double gu = s.g.eval(u);

  if (s.num.alpha == 0.0 && s.den.alpha == 0.0) {
    // E_0(f)/E_0(g) = (1 - g)/(1 - f): finite at the pole of the denominator.
    if (s.num.beta != 1.0 || s.den.beta != 1.0) {
      throw MathError(MathErrc::Domain, "alpha = 0 is only defined for beta = 1");
    }
    if (fu == 1.0) throw MathError(MathErrc::Pole, "numerator E_0 at its pole");
    const double one_minus_f = 1.0 - fu;
    const double r = (1.0 - gu) / one_minus_f;
    if (!need_deriv) return {r, 0.0};
    return {r, (r * s.f.deriv(u) - s.g.deriv(u)) / one_minus_f};
  }

  if (is_tanh_pair(s) && std::abs(u) > kTanhRatioSwitch) return tanh_ratio(u);

  double r = 0.0;
  double dr = 0.0;
  try {
    const double n = mlf::mlf(s.num, fu);
    const double d = mlf::mlf(s.den, gu);
    if (d == 0.0) throw MathError(MathErrc::Pole, "denominator Mittag-Leffler value is zero");
    r = n / d;
    if (need_deriv) {
      const double df = s.f.deriv(u);
      const double dg = s.g.deriv(u);
      const double dn = df == 0.0 ? 0.0 : mlf::mlf_deriv1(s.num, fu) * df;
      const double dd = dg == 0.0 ? 0.0 : mlf::mlf_deriv1(s.den, gu) * dg;
      dr = (dn - r * dd) / d;
    }
    if (std::isfinite(r) && std::isfinite(dr)) return {r, dr};
  } catch (const MathError& e) {
    if (e.code() != MathErrc::Overflow) throw;
  }
  if (is_erf_pair(s)) return erf_ratio(s.f.c, u);
  if (is_tanh_pair(s) && u != 0.0) return tanh_ratio(u);
  throw MathError(MathErrc::Overflow, "gate ratio is not representable");
}

struct Prefactor {
  double p;
  double dp;  // dP/dx
};

Prefactor prefactor(const GateSpec& s, double x, double u, double du, bool need_deriv) {
  const double gamma = s.gamma;
  if (s.transform.kind == InputTransform::Kind::Identity) {
    const double p = special::safe_pow(u, gamma);
    if (!need_deriv || gamma == 0.0) return {p, 0.0};
    return {p, gamma * special::safe_pow(u, gamma - 1.0)};
  }
  // The outer factor stays the raw input: x * u^{gamma-1}.
  const double base = special::safe_pow(u, gamma - 1.0);
  if (!need_deriv) return {x * base, 0.0};
  double dp = base;
  if (gamma != 1.0) dp += x * (gamma - 1.0) * special::safe_pow(u, gamma - 2.0) * du;
  return {x * base, dp};
}

GateValue evaluate(const GateSpec& s, double x, bool need_deriv) {
  if (!std::isfinite(x)) throw MathError(MathErrc::Domain, "non-finite gate input");
  if (s.negative_branch == NegativeBranch::Zero && x <= 0.0) return {0.0, 0.0};
  const double u = s.transform.eval(x);
  const double du = s.transform.deriv(x);
  const Prefactor pf = prefactor(s, x, u, du, need_deriv);
  const Ratio ratio = gate_ratio(s, u, need_deriv);
  const double value = s.output_scale * pf.p * ratio.r;
  if (!need_deriv) return {value, 0.0};
  // A zero prefactor kills the ratio term even where dR/du is huge.
  const double ratio_term = pf.p == 0.0 ? 0.0 : pf.p * ratio.dr * du;
  return {value, s.output_scale * (pf.dp * ratio.r + ratio_term)};
}

}  // namespace

double ArgFn::eval(double x) const noexcept {
  switch (kind) {
    case Kind::Zero: return 0.0;
    case Kind::NegExpScaled: return -saturating_exp(-c * x);
    case Kind::PosExp: return saturating_exp(-x);
    case Kind::NegAbs: return -std::abs(x);
    case Kind::Square: return x * x;
    case Kind::ScaledLinear: return c * x;
    case Kind::ScaledSquare: return c * x * x;
  }
  return 0.0;
}

double ArgFn::deriv(double x) const noexcept {
  switch (kind) {
    case Kind::Zero: return 0.0;
    case Kind::NegExpScaled: return c * saturating_exp(-c * x);
    case Kind::PosExp: return -saturating_exp(-x);
    case Kind::NegAbs: return x > 0.0 ? -1.0 : (x < 0.0 ? 1.0 : 0.0);
    case Kind::Square: return 2.0 * x;
    case Kind::ScaledLinear: return c;
    case Kind::ScaledSquare: return 2.0 * c * x;
  }
  return 0.0;
}

double ArgFn::deriv_c(double x) const noexcept {
  if (kind != Kind::NegExpScaled) return 0.0;
  return x * saturating_exp(-c * x);
}

double InputTransform::eval(double x) const noexcept {
  switch (kind) {
    case Kind::Identity: return x;
    case Kind::Scale: return c * x;
    case Kind::Softplus: return special::softplus(x);
  }
  return x;
}

double InputTransform::deriv(double x) const noexcept {
  switch (kind) {
    case Kind::Identity: return 1.0;
    case Kind::Scale: return c;
    case Kind::Softplus: return 1.0 / (1.0 + std::exp(-x));
  }
  return 1.0;
}

void GateSpec::validate() const {
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
    throw MathError(MathErrc::Domain, "gate exponent gamma must be finite and >= 0");
  }
  if (!(num.alpha >= 0.0) || !(den.alpha >= 0.0)) {
    throw MathError(MathErrc::Domain, "Mittag-Leffler orders must be >= 0");
  }
  if (!(output_scale > 0.0) || !std::isfinite(output_scale)) {
    throw MathError(MathErrc::Domain, "output scale must be positive");
  }
}

std::span<const Preset> all_presets() noexcept {
  static constexpr std::array kAll{
      Preset::ReLU, Preset::Sigmoid,         Preset::Swish,           Preset::Softsign, Preset::Tanh,
      Preset::Mish, Preset::BipolarSigmoidA, Preset::BipolarSigmoidB, Preset::GELU,
  };
  return kAll;
}

const char* to_string(Preset id) noexcept {
  switch (id) {
    case Preset::ReLU: return "relu";
    case Preset::Sigmoid: return "sigmoid";
    case Preset::Swish: return "swish";
    case Preset::Softsign: return "softsign";
    case Preset::Tanh: return "tanh";
    case Preset::Mish: return "mish";
    case Preset::BipolarSigmoidA: return "bipolar-sigmoid-a";
    case Preset::BipolarSigmoidB: return "bipolar-sigmoid-b";
    case Preset::GELU: return "gelu";
  }
  return "unknown";
}

std::optional<Preset> parse_preset(std::string_view name) {
  std::string key(name);
  std::transform(key.begin(), key.end(), key.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  for (Preset id : all_presets()) {
    if (key == to_string(id)) return id;
  }
  if (key == "swish1" || key == "swish-1") return Preset::Swish;
  if (key == "bipolar" || key == "bipolar-a") return Preset::BipolarSigmoidA;
  if (key == "bipolar-b") return Preset::BipolarSigmoidB;
  return std::nullopt;
}

GateSpec preset(Preset id, double swish_c) {
  const GateSpec tanh_gate{1.0,
                           {2.0, 2.0},
                           {2.0, 1.0},
                           ArgFn::square(),
                           ArgFn::square(),
                           InputTransform::identity(),
                           1.0,
                           NegativeBranch::Gate};
  GateSpec s;
  switch (id) {
    case Preset::ReLU:
      s.gamma = 1.0;
      s.negative_branch = NegativeBranch::Zero;
      break;
    case Preset::Sigmoid:
      s.gamma = 0.0;
      s.num = {0.0, 1.0};
      s.f = ArgFn::neg_exp_scaled(1.0);
      break;
    case Preset::Swish:
      s.gamma = 1.0;
      s.num = {0.0, 1.0};
      s.f = ArgFn::neg_exp_scaled(swish_c);
      break;
    case Preset::Softsign:
      s.gamma = 1.0;
      s.num = {0.0, 1.0};
      s.f = ArgFn::neg_abs();
      break;
    case Preset::Tanh:
      s = tanh_gate;
      break;
    case Preset::Mish:
      s = tanh_gate;
      s.gamma = 2.0;
      s.transform = InputTransform::softplus();
      break;
    case Preset::BipolarSigmoidA:
      s.gamma = 0.0;
      s.num = {0.0, 1.0};
      s.den = {0.0, 1.0};
      s.f = ArgFn::neg_exp_scaled(1.0);
      s.g = ArgFn::pos_exp();
      break;
    case Preset::BipolarSigmoidB:
      s = tanh_gate;
      s.transform = InputTransform::scale(0.5);
      s.output_scale = 0.5;
      break;
    case Preset::GELU:
      s.gamma = 1.0;
      s.num = {0.5, 1.0};
      s.f = ArgFn::scaled_linear(1.0 / std::numbers::sqrt2);
      s.g = ArgFn::scaled_square(0.5);
      s.output_scale = 0.5;
      break;
  }
  return s;
}

double gate_eval(const GateSpec& s, double x) { return evaluate(s, x, false).value; }

double gate_deriv(const GateSpec& s, double x) { return evaluate(s, x, true).deriv; }

GateValue gate_eval_deriv(const GateSpec& s, double x) { return evaluate(s, x, true); }

double gate_deriv_param_c(const GateSpec& s, double x) {
  if (!s.f.carries_scale()) {
    throw MathError(MathErrc::UnsupportedParameter, "gate numerator map has no scale parameter c");
  }
  if (!std::isfinite(x)) throw MathError(MathErrc::Domain, "non-finite gate input");
  if (s.negative_branch == NegativeBranch::Zero && x <= 0.0) return 0.0;
  const double u = s.transform.eval(x);
  const Prefactor pf = prefactor(s, x, u, s.transform.deriv(x), false);
  if (pf.p == 0.0) return 0.0;
  const double fu = s.f.eval(u);
  const double d = mlf::mlf(s.den, s.g.eval(u));
  if (d == 0.0) throw MathError(MathErrc::Pole, "denominator Mittag-Leffler value is zero");
  const double dn_dc = mlf::mlf_deriv1(s.num, fu) * s.f.deriv_c(u);
  return s.output_scale * pf.p * dn_dc / d;
}

GateSpec tanh_interpolation_spec(double beta2) {
  GateSpec s = preset(Preset::Tanh);
  s.den.beta = beta2;
  return s;
}

SweepTable interpolation_sweep(std::span<const double> beta2_values, std::span<const double> xs) {
  for (double b : beta2_values) {
    if (!(b >= 1.0 && b <= 2.0)) {
      throw MathError(MathErrc::Domain, "beta2 must lie in [1, 2], got " + std::to_string(b));
    }
  }
  for (double x : xs) {
    if (!(std::abs(x) <= kTanhRatioSwitch)) {
      throw MathError(MathErrc::Domain, "interpolation sweep needs |x| <= 25");
    }
  }
  SweepTable table;
  table.beta2.assign(beta2_values.begin(), beta2_values.end());
  table.xs.assign(xs.begin(), xs.end());
  table.values.reserve(table.beta2.size() * table.xs.size());
  for (double b : table.beta2) {
    const GateSpec s = tanh_interpolation_spec(b);
    for (double x : table.xs) table.values.push_back(gate_eval(s, x));
  }
  return table;
}

}  // namespace mlgate::gate

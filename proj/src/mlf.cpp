#include "mlgate/mlf.hpp"

#include <quadmath.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>

#include "mlgate/error.hpp"
#include "mlgate/special.hpp"

namespace mlgate::mlf {

namespace {

using quad = __float128;

// Past this exponent a positive-axis value cannot be represented in double.
constexpr double kLogDoubleMax = 709.78;
// The asymptotic expansion is used once its remainder is below e^-36 (~2e-16).
constexpr double kAsymptoticLogAccuracy = 36.0;
// Beyond this e^L the binary128 series cannot recover a double-accurate value.
constexpr double kSeriesMaxLogScale = 60.0;
// Double sums losing more than two digits are redone in binary128.
constexpr double kDoubleCancellationLimit = 1e2;
constexpr double kQuadCancellationLimit = 1e18;
constexpr double kCancellationWarning = 1e8;
constexpr std::size_t kAutoAsymptoticTerms = 100000;
constexpr std::size_t kSeriesTermCap = 5000000;

double abs_value(double x) { return std::fabs(x); }
quad abs_value(quad x) { return fabsq(x); }

// Neumaier's variant of Kahan summation (also robust when |term| > |sum|).
template <typename Real>
class CompensatedSum {
 public:
  void add(Real x) {
    const Real t = sum_ + x;
    if (abs_value(sum_) >= abs_value(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  Real value() const { return sum_ + comp_; }

 private:
  Real sum_ = 0;
  Real comp_ = 0;
};

double term_double(MlfParams p, double z, double log_abs_z, std::size_t k) {
  const double arg = p.alpha * static_cast<double>(k) + p.beta;
  const bool flip = z < 0.0 && (k & 1U) != 0;
  const double klog = static_cast<double>(k) * log_abs_z;
  double t;
  if (arg < 170.0 && std::abs(klog) < 700.0) {
    t = std::pow(std::abs(z), static_cast<double>(k)) * special::rgamma(arg);
  } else {
    const auto lr = special::log_rgamma(arg);
    if (lr.sign == 0) return 0.0;
    t = lr.sign * std::exp(klog + lr.log_abs);
  }
  return flip ? -t : t;
}

quad term_quad(quad alpha, quad beta, bool negative, quad log_abs_z, std::size_t k) {
  const quad arg = alpha * static_cast<quad>(k) + beta;
  if (special::is_nonpositive_integer(static_cast<double>(arg))) return 0;
  // Sign of Gamma on the negative axis alternates between unit intervals.
  int sign = 1;
  if (arg < 0) {
    const long long fl = static_cast<long long>(floorq(arg));
    sign = (fl % 2 != 0) ? -1 : 1;
  }
  quad t = expq(static_cast<quad>(k) * log_abs_z - lgammaq(arg));
  if (sign < 0) t = -t;
  if (negative && (k & 1U) != 0) t = -t;
  return t;
}

template <typename Real>
struct SumOutcome {
  Real value;
  Real max_partial;
  std::size_t terms;
};

// Shared stopping rule: three consecutive terms past the peak of |term_k|
// that are no larger than tol * |partial sum|. Terms sitting on a pole of
// Gamma are exact zeros and neither count nor reset the run.
template <typename Real, typename TermFn>
std::optional<SumOutcome<Real>> sum_terms(MlfParams p, double abs_z, double tol,
                                          std::size_t max_terms, TermFn&& term) {
  const double peak = std::pow(abs_z, 1.0 / p.alpha);
  CompensatedSum<Real> sum;
  Real max_partial = 0;
  int small_run = 0;
  for (std::size_t k = 0; k < max_terms; ++k) {
    const double arg = p.alpha * static_cast<double>(k) + p.beta;
    if (special::is_nonpositive_integer(arg)) continue;
    const Real t = term(k);
    sum.add(t);
    const Real partial = sum.value();
    if (!std::isfinite(static_cast<double>(partial))) {
      throw MathError(MathErrc::Overflow, "Mittag-Leffler series exceeds double range");
    }
    max_partial = std::max(max_partial, abs_value(partial));
    const bool past_peak = p.alpha * static_cast<double>(k) >= peak + 1.0 && arg > 1.0;
    if (past_peak && abs_value(t) <= static_cast<Real>(tol) * abs_value(partial)) {
      if (++small_run >= 3) return SumOutcome<Real>{partial, max_partial, k + 1};
    } else {
      small_run = 0;
    }
  }
  return std::nullopt;
}

void check_params(MlfParams p, double z) {
  if (!std::isfinite(p.alpha) || !std::isfinite(p.beta) || !std::isfinite(z)) {
    throw MathError(MathErrc::Domain, "non-finite Mittag-Leffler argument");
  }
  if (p.alpha < 0.0) throw MathError(MathErrc::Domain, "alpha must be nonnegative");
}

double geometric(MlfParams p, double z) {
  if (p.beta != 1.0) {
    throw MathError(MathErrc::Domain, "alpha = 0 is only defined for beta = 1");
  }
  if (z == 1.0) throw MathError(MathErrc::Pole, "E_0(z) = 1/(1-z) at z = 1");
  return 1.0 / (1.0 - z);
}

double finite_or_overflow(double v) {
  if (!std::isfinite(v)) throw MathError(MathErrc::Overflow, "Mittag-Leffler closed form overflow");
  return v;
}

std::optional<double> closed_form(MlfParams p, double z) {
  if (p == MlfParams{1.0, 1.0}) return finite_or_overflow(std::exp(z));
  if (p == MlfParams{2.0, 1.0} && z >= 0.0) return finite_or_overflow(std::cosh(std::sqrt(z)));
  if (p == MlfParams{2.0, 2.0} && z >= 0.0) {
    if (z == 0.0) return 1.0;
    const double s = std::sqrt(z);
    return finite_or_overflow(std::sinh(s) / s);
  }
  // erfc(25) is still a normal double; below that the asymptotic regime takes over.
  if (p == MlfParams{0.5, 1.0} && z >= -25.0) {
    return finite_or_overflow(std::exp(z * z) * special::erfc(-z));
  }
  return std::nullopt;
}

std::size_t series_budget(double alpha, double scale) {
  const double budget = 200.0 + (2.0 * scale + 40.0 * std::sqrt(scale)) / alpha;
  if (!(budget < static_cast<double>(kSeriesTermCap))) return kSeriesTermCap;
  return std::max<std::size_t>(kDefaultMaxTerms, static_cast<std::size_t>(budget));
}

// Series regime used by automatic dispatch: double precision first, binary128
// on the negative axis when the double sum cancelled away too many digits.
double series_regime(MlfParams p, double z) {
  if (z == 0.0) return special::rgamma(p.beta);
  const double abs_z = std::abs(z);
  const double log_abs_z = std::log(abs_z);
  const double scale = std::pow(abs_z, 1.0 / p.alpha);
  if (z > 0.0 && scale > 600.0) {
    const double log_estimate = scale + (1.0 - p.beta) / p.alpha * log_abs_z - std::log(p.alpha);
    if (log_estimate > kLogDoubleMax) {
      throw MathError(MathErrc::Overflow, "E_{alpha,beta}(z) exceeds double range");
    }
  }
  const std::size_t budget = series_budget(p.alpha, scale);

  const auto dbl = sum_terms<double>(p, abs_z, kDefaultSeriesTol, budget, [&](std::size_t k) {
    return term_double(p, z, log_abs_z, k);
  });
  if (!dbl) throw MathError(MathErrc::Nonconvergence, "Mittag-Leffler series did not converge");
  if (z > 0.0 || dbl->max_partial <= kDoubleCancellationLimit * std::abs(dbl->value)) {
    return dbl->value;
  }

  const quad qa = p.alpha;
  const quad qb = p.beta;
  const quad qlog = logq(static_cast<quad>(abs_z));
  const auto ext = sum_terms<quad>(p, abs_z, 1e-20, budget, [&](std::size_t k) {
    return term_quad(qa, qb, true, qlog, k);
  });
  if (!ext) throw MathError(MathErrc::Nonconvergence, "extended Mittag-Leffler series did not converge");
  if (ext->max_partial > static_cast<quad>(kQuadCancellationLimit) * fabsq(ext->value)) {
    throw MathError(MathErrc::Nonconvergence,
                    "cancellation in the Mittag-Leffler series exceeds extended precision");
  }
  return static_cast<double>(ext->value);
}

// log of the relative remainder of the optimally truncated negative-axis
// expansion, in units of e: about -y^{1/alpha} for alpha <= 1 and
// y^{1/alpha} cos(pi/alpha) for 1 < alpha < 2.
double asymptotic_accuracy(double alpha, double scale) {
  if (alpha <= 1.0) return scale;
  return -std::cos(std::numbers::pi / alpha) * scale;
}

}  // namespace

const char* to_string(EvalMethod method) noexcept {
  switch (method) {
    case EvalMethod::ClosedForm: return "closed";
    case EvalMethod::Series: return "series";
    case EvalMethod::AsymptoticNegAxis: return "asymptotic";
    case EvalMethod::Geometric: return "geometric";
  }
  return "unknown";
}

SeriesResult mlf_series(MlfParams p, double z, double tol, std::size_t max_terms) {
  check_params(p, z);
  if (p.alpha <= 0.0) throw MathError(MathErrc::Domain, "series requires alpha > 0");
  if (z == 0.0) return {special::rgamma(p.beta), 1, std::abs(special::rgamma(p.beta)), false};
  const double log_abs_z = std::log(std::abs(z));
  const auto out = sum_terms<double>(p, std::abs(z), tol, max_terms, [&](std::size_t k) {
    return term_double(p, z, log_abs_z, k);
  });
  if (!out) {
    throw MathError(MathErrc::Nonconvergence,
                    "series not converged after " + std::to_string(max_terms) + " terms");
  }
  SeriesResult r;
  r.value = out->value;
  r.terms = out->terms;
  r.max_partial = out->max_partial;
  r.cancellation_warning = out->max_partial > kCancellationWarning * std::abs(out->value);
  return r;
}

double mlf_asymptotic_neg(MlfParams p, double y, std::size_t n_terms) {
  check_params(p, -y);
  if (!(p.alpha > 0.0 && p.alpha < 2.0)) {
    throw MathError(MathErrc::Domain, "negative-axis expansion requires 0 < alpha < 2");
  }
  if (!(y > 0.0)) throw MathError(MathErrc::Domain, "negative-axis expansion requires y > 0");
  const double log_y = std::log(y);
  CompensatedSum<double> sum;
  double previous = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k <= n_terms; ++k) {
    const double ak = p.alpha * static_cast<double>(k);
    // Truncate on the envelope Gamma(1 - beta + ak) / (pi y^k); the sine
    // factor of the reflection formula makes single terms dip arbitrarily.
    const double envelope = std::lgamma(1.0 - p.beta + ak) - static_cast<double>(k) * log_y;
    if (ak > p.beta && envelope > previous) break;  // smallest term passed
    previous = std::min(previous, envelope);
    const auto lr = special::log_rgamma(p.beta - ak);
    if (lr.sign == 0) continue;
    const double mag = std::exp(lr.log_abs - static_cast<double>(k) * log_y);
    const int sign = ((k & 1U) != 0 ? 1 : -1) * lr.sign;
    sum.add(sign * mag);
    if (ak > p.beta && std::exp(envelope) < 1e-18 * std::abs(sum.value())) break;
  }
  return sum.value();
}

MlfResult mlf_eval(MlfParams p, double z, MethodChoice choice) {
  check_params(p, z);
  if (p.alpha == 0.0) {
    if (choice == MethodChoice::Series || choice == MethodChoice::Asymptotic) {
      throw MathError(MathErrc::Domain, "alpha = 0 is only available through the geometric rule");
    }
    return {geometric(p, z), EvalMethod::Geometric};
  }

  switch (choice) {
    case MethodChoice::ClosedForm: {
      if (auto v = closed_form(p, z)) return {*v, EvalMethod::ClosedForm};
      throw MathError(MathErrc::Domain, "no closed form for these parameters");
    }
    case MethodChoice::Series:
      return {series_regime(p, z), EvalMethod::Series};
    case MethodChoice::Asymptotic:
      if (!(z < 0.0)) throw MathError(MathErrc::Domain, "asymptotic regime needs z < 0");
      return {mlf_asymptotic_neg(p, -z, kAutoAsymptoticTerms), EvalMethod::AsymptoticNegAxis};
    case MethodChoice::Auto:
      break;
  }

  if (auto v = closed_form(p, z)) return {*v, EvalMethod::ClosedForm};
  if (z >= 0.0) return {series_regime(p, z), EvalMethod::Series};

  const double scale = std::pow(-z, 1.0 / p.alpha);
  if (p.alpha < 2.0 && asymptotic_accuracy(p.alpha, scale) >= kAsymptoticLogAccuracy) {
    return {mlf_asymptotic_neg(p, -z, kAutoAsymptoticTerms), EvalMethod::AsymptoticNegAxis};
  }
  if (scale > kSeriesMaxLogScale) {
    throw MathError(MathErrc::Nonconvergence,
                    "no accurate regime for E_{" + std::to_string(p.alpha) + "," +
                        std::to_string(p.beta) + "}(" + std::to_string(z) + ")");
  }
  return {series_regime(p, z), EvalMethod::Series};
}

double mlf_deriv1(MlfParams p, double z) {
  check_params(p, z);
  if (p.alpha == 0.0) {
    const double g = geometric(p, z);
    return g * g;
  }
  if (p == MlfParams{1.0, 1.0}) return finite_or_overflow(std::exp(z));
  if (p == MlfParams{0.5, 1.0} && z >= -25.0) {
    return finite_or_overflow(2.0 / std::sqrt(std::numbers::pi) + 2.0 * z * *closed_form(p, z));
  }
  if (p == MlfParams{2.0, 1.0} && z >= 0.0) return 0.5 * *closed_form({2.0, 2.0}, z);
  if (p == MlfParams{2.0, 2.0} && z >= 1.0) {
    const double s = std::sqrt(z);
    return finite_or_overflow((std::cosh(s) - std::sinh(s) / s) / (2.0 * z));
  }
  double d = mlf({p.alpha, p.alpha + p.beta - 1.0}, z);
  if (p.beta != 1.0) d += (1.0 - p.beta) * mlf({p.alpha, p.alpha + p.beta}, z);
  return d / p.alpha;
}

std::vector<double> derivative_coefficients(MlfParams p, unsigned m) {
  std::vector<double> c{1.0};
  for (unsigned j = 1; j <= m; ++j) {
    const double shift = 1.0 - p.beta - p.alpha * static_cast<double>(j - 1);
    std::vector<double> next(j + 1);
    next[0] = shift * c[0];
    for (unsigned k = 1; k + 1 <= j; ++k) {
      next[k] = c[k - 1] + (shift + static_cast<double>(k)) * c[k];
    }
    next[j] = 1.0;
    c = std::move(next);
  }
  return c;
}

double mlf_deriv_m(MlfParams p, double z, unsigned m) {
  check_params(p, z);
  if (m == 0) return mlf(p, z);
  if (p.alpha == 0.0) {
    // d^m/dz^m 1/(1-z) = m! / (1-z)^{m+1}
    const double g = geometric(p, z);
    return std::tgamma(m + 1.0) * std::pow(g, m + 1.0);
  }
  const auto c = derivative_coefficients(p, m);
  double acc = 0.0;
  for (unsigned k = 0; k <= m; ++k) {
    if (c[k] == 0.0) continue;
    acc += c[k] * mlf({p.alpha, p.alpha * m + p.beta - k}, z);
  }
  return acc / std::pow(p.alpha, static_cast<double>(m));
}

double mlf_deriv_one_param(RationalOrder order, double z) {
  if (order.p == 0 || order.q == 0) {
    throw MathError(MathErrc::Domain, "rational order needs positive p and q");
  }
  if (!std::isfinite(z)) throw MathError(MathErrc::Domain, "non-finite argument");
  if (order.q == 1) {
    const double a = order.p;
    return mlf({a, 1.0}, std::pow(z, a));
  }
  if (!(z > 0.0)) throw MathError(MathErrc::Domain, "z must be positive for q >= 2");
  const double a = static_cast<double>(order.p) / static_cast<double>(order.q);
  double acc = mlf({a, 1.0}, std::pow(z, a));
  for (unsigned k = 1; k < order.q; ++k) {
    const double e = a * static_cast<double>(k);
    acc += std::pow(z, -e) * special::rgamma(1.0 - e);
  }
  return acc;
}

}  // namespace mlgate::mlf

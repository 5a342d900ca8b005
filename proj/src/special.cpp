#include "mlgate/special.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "mlgate/error.hpp"

namespace mlgate {

const char* to_string(MathErrc code) noexcept {
  switch (code) {
    case MathErrc::Pole: return "pole";
    case MathErrc::Domain: return "domain";
    case MathErrc::Overflow: return "overflow";
    case MathErrc::Nonconvergence: return "nonconvergence";
    case MathErrc::Singularity: return "singularity";
    case MathErrc::UnsupportedParameter: return "unsupported-parameter";
  }
  return "unknown";
}

const char* to_string(DataErrc code) noexcept {
  switch (code) {
    case DataErrc::Io: return "io-error";
    case DataErrc::BadMagic: return "bad-magic";
    case DataErrc::Truncated: return "truncated-file";
    case DataErrc::CountMismatch: return "count-mismatch";
    case DataErrc::Shape: return "shape-error";
  }
  return "unknown";
}

namespace special {

namespace {
constexpr double kPoleTolerance = 1e-12;
constexpr double kGammaOverflow = 171.6;
}  // namespace

bool is_nonpositive_integer(double x) noexcept {
  if (x > kPoleTolerance) return false;
  return std::abs(x - std::round(x)) <= kPoleTolerance;
}

bool is_integer(double x) noexcept { return std::isfinite(x) && x == std::floor(x); }

double gamma(double x) {
  if (std::isnan(x)) throw MathError(MathErrc::Domain, "gamma of NaN");
  if (is_nonpositive_integer(x)) {
    throw MathError(MathErrc::Pole, "gamma(" + std::to_string(x) + ") at nonpositive integer");
  }
  if (x > kGammaOverflow) {
    throw MathError(MathErrc::Overflow, "gamma(" + std::to_string(x) + ") exceeds double range");
  }
  return std::tgamma(x);
}

double rgamma(double x) noexcept {
  if (std::isnan(x) || is_nonpositive_integer(x)) return 0.0;
  if (x > kGammaOverflow) return std::exp(-std::lgamma(x));
  if (x < -170.0) {
    // Reflection keeps the huge magnitudes in log space as long as possible.
    int sign = 0;
    const double lg = ::lgamma_r(x, &sign);
    return sign * std::exp(-lg);
  }
  return 1.0 / std::tgamma(x);
}

LogRgamma log_rgamma(double x) noexcept {
  if (std::isnan(x) || is_nonpositive_integer(x)) {
    return {-std::numeric_limits<double>::infinity(), 0};
  }
  int sign = 0;
  const double lg = ::lgamma_r(x, &sign);
  return {-lg, sign};
}

double erf(double x) noexcept { return std::erf(x); }

double erfc(double x) noexcept { return std::erfc(x); }

double softplus(double x) noexcept {
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

double safe_pow(double x, double p) {
  if (p == 0.0) return 1.0;
  if (x == 0.0) {
    if (p < 0.0) throw MathError(MathErrc::Singularity, "0 raised to a negative power");
    return 0.0;
  }
  if (x < 0.0 && !is_integer(p)) {
    throw MathError(MathErrc::Domain, "negative base with noninteger exponent");
  }
  if (p == 1.0) return x;
  if (p == 2.0) return x * x;
  return std::pow(x, p);
}

}  // namespace special
}  // namespace mlgate

#pragma once

// Scalar special functions shared by the Mittag-Leffler and gate kernels.
// All functions are pure; they either return a finite value or throw
// mlgate::MathError.

namespace mlgate::special {

/// True when x lies within 1e-12 of a nonpositive integer.
bool is_nonpositive_integer(double x) noexcept;

/// Gamma function. Throws Pole at nonpositive integers and Overflow for x > 171.6.
double gamma(double x);

/// 1/Gamma(x). Total: exactly 0 at the poles of Gamma.
double rgamma(double x) noexcept;

/// log|1/Gamma(x)| and its sign. sign is 0 at the poles (log value is -inf then).
struct LogRgamma {
  double log_abs;
  int sign;
};
LogRgamma log_rgamma(double x) noexcept;

double erf(double x) noexcept;
double erfc(double x) noexcept;

/// log(1 + e^x) without overflow.
double softplus(double x) noexcept;

/// x^p with the conventions the gate needs: integer p allows negative x,
/// 0^0 = 1. Throws Domain for negative x with noninteger p and Singularity
/// for 0 raised to a negative power.
double safe_pow(double x, double p);

bool is_integer(double x) noexcept;

}  // namespace mlgate::special

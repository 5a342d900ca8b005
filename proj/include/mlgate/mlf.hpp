#pragma once

// Real-argument Mittag-Leffler functions
//
//   E_{alpha,beta}(z) = sum_k z^k / Gamma(alpha k + beta),   E_alpha = E_{alpha,1}
//
// together with their derivatives in z. Evaluation picks one of four
// regimes and reports which one produced the value:
//
//   Geometric          alpha = 0, beta = 1: 1/(1 - z) for every z != 1
//   ClosedForm         (1,1) exp, (2,1) cosh(sqrt z), (2,2) sinh(sqrt z)/sqrt z,
//                      (1/2,1) exp(z^2) erfc(-z)
//   Series             compensated Taylor sum; on the negative axis the sum is
//                      redone in binary128 when double cancellation is detected
//   AsymptoticNegAxis  optimally truncated algebraic expansion for z -> -inf
//
// Failures are reported with mlgate::MathError.

#include <cstddef>
#include <vector>

namespace mlgate::mlf {

struct MlfParams {
  double alpha = 1.0;
  double beta = 1.0;

  friend bool operator==(const MlfParams&, const MlfParams&) = default;
};

enum class EvalMethod { ClosedForm, Series, AsymptoticNegAxis, Geometric };

/// Short lowercase tag: "closed", "series", "asymptotic", "geometric".
const char* to_string(EvalMethod method) noexcept;

/// Regime selection for mlf_eval. Auto applies the dispatch order above.
enum class MethodChoice { Auto, ClosedForm, Series, Asymptotic };

struct MlfResult {
  double value;
  EvalMethod method;
};

MlfResult mlf_eval(MlfParams p, double z, MethodChoice choice = MethodChoice::Auto);

/// Value-only shorthand for mlf_eval with automatic dispatch.
inline double mlf(MlfParams p, double z) { return mlf_eval(p, z).value; }

struct SeriesResult {
  double value = 0.0;
  std::size_t terms = 0;
  /// Largest |partial sum| seen while summing.
  double max_partial = 0.0;
  /// Set when max_partial > 1e8 |value|: most digits were lost to cancellation.
  bool cancellation_warning = false;
};

inline constexpr double kDefaultSeriesTol = 1e-15;
inline constexpr std::size_t kDefaultMaxTerms = 500;

/// Plain double-precision Kahan-compensated Taylor sum. Stops after three
/// consecutive post-peak terms with |term| <= tol |sum|; throws Nonconvergence
/// when max_terms is exhausted first.
SeriesResult mlf_series(MlfParams p, double z, double tol = kDefaultSeriesTol,
                        std::size_t max_terms = kDefaultMaxTerms);

/// E_{alpha,beta}(-y) ~ sum_{k=1..n} (-1)^{k-1} y^{-k} / Gamma(beta - alpha k),
/// cut at the smallest-magnitude term. Requires 0 < alpha < 2 and y > 0.
double mlf_asymptotic_neg(MlfParams p, double y, std::size_t n_terms);

/// d/dz E_{alpha,beta}(z) = [E_{alpha,alpha+beta-1}(z) + (1-beta) E_{alpha,alpha+beta}(z)] / alpha.
/// For the geometric limit (alpha = 0, beta = 1) returns 1/(1-z)^2.
double mlf_deriv1(MlfParams p, double z);

/// Coefficients c_k^{(m)}, k = 0..m, of
///   d^m/dz^m E_{alpha,beta}(z) = alpha^{-m} sum_k c_k^{(m)} E_{alpha, alpha m + beta - k}(z).
std::vector<double> derivative_coefficients(MlfParams p, unsigned m);

/// m-th derivative through derivative_coefficients; m = 0 is mlf_eval.
double mlf_deriv_m(MlfParams p, double z, unsigned m);

/// Rational order p/q of a one-parameter function, kept as integers.
struct RationalOrder {
  unsigned p = 1;
  unsigned q = 1;
};

/// d^p/dz^p of the composite E_{p/q}(z^{p/q}):
///   E_{p/q}(z^{p/q}) + sum_{k=1}^{q-1} z^{-kp/q} / Gamma(1 - kp/q).
/// z > 0 is required when q >= 2.
double mlf_deriv_one_param(RationalOrder order, double z);

}  // namespace mlgate::mlf

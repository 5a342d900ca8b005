#pragma once

// Extended-precision reference values computed with MPFR. These routines sum
// the defining power series directly and never call into the library under
// test.

#include <cstddef>

namespace mlgate::oracle {

/// E_{alpha,beta}(z) from the Taylor series at a working precision large
/// enough to absorb the cancellation on the negative axis. At least
/// min_terms terms are summed; summation continues until the tail is below
/// 2^-200 relative.
double mlf(double alpha, double beta, double z, std::size_t min_terms = 300);

/// E_{alpha,beta}(z) for 0 < alpha < 1 and z < 0 from the real-line integral
/// representation, integrated by exp-sinh quadrature in long double. Values of
/// beta >= 1 + alpha are first reduced with E_{a,b}(z) = (E_{a,b-a}(z) - 1/Gamma(b-a)) / z.
/// Used where the Taylor series needs impractically many digits.
double mlf_integral(double alpha, double beta, double z);

/// True when |E_{alpha,beta}(z)| exceeds the double range.
bool mlf_overflows(double alpha, double beta, double z);

/// d^2/dz^2 E_{alpha,beta}(z) from the term-wise differentiated series
/// sum_k k (k-1) z^{k-2} / Gamma(alpha k + beta) using `terms` terms.
double mlf_d2_series(double alpha, double beta, double z, std::size_t terms = 100);

double gamma(double x);
double erf(double x);

}  // namespace mlgate::oracle

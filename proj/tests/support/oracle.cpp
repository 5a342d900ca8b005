#include "oracle.hpp"

#include <mpfr.h>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <numbers>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace mlgate::oracle {

namespace {

// RAII holder for an mpfr_t.
class Mp {
 public:
  explicit Mp(mpfr_prec_t prec) { mpfr_init2(v_, prec); }
  Mp(const Mp&) = delete;
  Mp& operator=(const Mp&) = delete;
  ~Mp() { mpfr_clear(v_); }
  mpfr_ptr get() { return v_; }
  operator mpfr_ptr() { return v_; }
  mpfr_ptr operator->() { return v_; }

 private:
  mpfr_t v_;
};

mpfr_prec_t working_precision(double alpha, double z) {
  // No cancellation on the positive axis.
  if (z >= 0.0) return 192;
  // Terms grow to about e^{|z|^{1/alpha}} while the sum can be O(1) or smaller.
  const double scale = std::pow(std::abs(z), 1.0 / alpha);
  return static_cast<mpfr_prec_t>(256 + 1.4427 * scale * 1.2);
}

struct SeriesValue {
  double value;
  bool overflow;
};

SeriesValue series(double alpha, double beta, double z, std::size_t min_terms) {
  const mpfr_prec_t prec = working_precision(alpha, z);
  Mp sum(prec), term(prec), arg(prec), zpow(prec), zz(prec), g(prec), tmp(prec);
  mpfr_set_d(zz, z, MPFR_RNDN);
  mpfr_set_ui(sum, 0, MPFR_RNDN);
  mpfr_set_ui(zpow, 1, MPFR_RNDN);
  const double peak = std::pow(std::abs(z), 1.0 / alpha);
  const std::size_t hard_cap = 4000000;
  for (std::size_t k = 0; k < hard_cap; ++k) {
    if (k > 0) mpfr_mul(zpow, zpow, zz, MPFR_RNDN);
    // arg = alpha k + beta, exact for double inputs at this precision
    mpfr_set_d(arg, alpha, MPFR_RNDN);
    mpfr_mul_ui(arg, arg, static_cast<unsigned long>(k), MPFR_RNDN);
    mpfr_set_d(tmp, beta, MPFR_RNDN);
    mpfr_add(arg, arg, tmp, MPFR_RNDN);
    const bool pole = mpfr_integer_p(arg) && mpfr_sgn(arg) <= 0;
    if (!pole) {
      mpfr_gamma(g, arg, MPFR_RNDN);
      mpfr_div(term, zpow, g, MPFR_RNDN);
      mpfr_add(sum, sum, term, MPFR_RNDN);
    } else {
      mpfr_set_ui(term, 0, MPFR_RNDN);
    }
    if (k >= min_terms && alpha * static_cast<double>(k) > peak + 2.0 && !pole) {
      // converged when |term| < 2^-200 |sum|
      if (mpfr_zero_p(term)) break;
      const long et = mpfr_get_exp(term);
      const long es = mpfr_zero_p(sum) ? et : mpfr_get_exp(sum);
      if (et < es - 200) break;
    }
    if (k + 1 == hard_cap) throw std::runtime_error("oracle series did not converge");
  }
  const double v = mpfr_get_d(sum, MPFR_RNDN);
  return {v, std::isinf(v)};
}

}  // namespace

double mlf(double alpha, double beta, double z, std::size_t min_terms) {
  return series(alpha, beta, z, min_terms).value;
}

bool mlf_overflows(double alpha, double beta, double z) {
  if (z <= 0.0) return false;
  const double scale = std::pow(z, 1.0 / alpha);
  if (scale > 100.0) {
    // Leading term (1/alpha) z^{(1-beta)/alpha} e^{z^{1/alpha}}, relative error O(1/scale).
    const double log_e = scale + (1.0 - beta) / alpha * std::log(z) - std::log(alpha);
    return log_e > std::log(1.7976931348623157e308);
  }
  return series(alpha, beta, z, 0).overflow;
}

double mlf_d2_series(double alpha, double beta, double z, std::size_t terms) {
  const mpfr_prec_t prec = working_precision(alpha, z) + 64;
  Mp sum(prec), term(prec), arg(prec), tmp(prec), g(prec), zz(prec);
  mpfr_set_d(zz, z, MPFR_RNDN);
  mpfr_set_ui(sum, 0, MPFR_RNDN);
  for (std::size_t k = 2; k < terms; ++k) {
    mpfr_set_d(arg, alpha, MPFR_RNDN);
    mpfr_mul_ui(arg, arg, static_cast<unsigned long>(k), MPFR_RNDN);
    mpfr_set_d(tmp, beta, MPFR_RNDN);
    mpfr_add(arg, arg, tmp, MPFR_RNDN);
    if (mpfr_integer_p(arg) && mpfr_sgn(arg) <= 0) continue;
    mpfr_gamma(g, arg, MPFR_RNDN);
    mpfr_pow_ui(term, zz, static_cast<unsigned long>(k - 2), MPFR_RNDN);
    mpfr_mul_ui(term, term, static_cast<unsigned long>(k * (k - 1)), MPFR_RNDN);
    mpfr_div(term, term, g, MPFR_RNDN);
    mpfr_add(sum, sum, term, MPFR_RNDN);
  }
  return mpfr_get_d(sum, MPFR_RNDN);
}

double mlf_integral(double alpha, double beta, double z) {
  if (!(alpha > 0.0 && alpha < 1.0) || !(z < 0.0)) throw std::domain_error("integral form needs 0 < alpha < 1, z < 0");
  using R = long double;
  const R a = alpha;
  const R zz = z;
  if (beta >= 1.0 + alpha) {
    const R shifted = mlf_integral(alpha, beta - alpha, z);
    const R rg = 1.0L / boost::math::tgamma(static_cast<R>(beta) - a);
    return static_cast<double>((shifted - rg) / zz);
  }
  const R b = beta;
  const R pi = std::numbers::pi_v<R>;
  // chi = t^q removes the chi^{(1-beta)/alpha} endpoint singularity.
  const R q = a / (a + 1.0L - b);
  const R s1 = std::sin(pi * (1.0L - b));
  const R s2 = std::sin(pi * (1.0L - b + a));
  const R ca = std::cos(pi * a);
  auto integrand = [&](R t) -> R {
    const R chi = std::pow(t, q);
    const R decay = std::exp(-std::pow(t, q / a));
    if (decay == 0.0L) return 0.0L;
    return q * decay * (chi * s1 - zz * s2) / (chi * chi - 2.0L * chi * zz * ca + zz * zz);
  };
  boost::math::quadrature::exp_sinh<R> integrator;
  const R v = integrator.integrate(integrand, std::numeric_limits<R>::epsilon() * 16) / (a * pi);
  return static_cast<double>(v);
}

double gamma(double x) {
  Mp a(256), r(256);
  mpfr_set_d(a, x, MPFR_RNDN);
  mpfr_gamma(r, a, MPFR_RNDN);
  return mpfr_get_d(r, MPFR_RNDN);
}

double erf(double x) {
  Mp a(256), r(256);
  mpfr_set_d(a, x, MPFR_RNDN);
  mpfr_erf(r, a, MPFR_RNDN);
  return mpfr_get_d(r, MPFR_RNDN);
}

}  // namespace mlgate::oracle

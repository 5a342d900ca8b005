#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "mlgate/error.hpp"
#include "mlgate/special.hpp"
#include "support/oracle.hpp"

namespace sp = mlgate::special;
using mlgate::MathErrc;
using mlgate::MathError;

namespace {

MathErrc error_code(auto&& fn) {
  try {
    fn();
  } catch (const MathError& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected MathError";
  return MathErrc::Domain;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST(Gamma, Factorials) {
  EXPECT_EQ(sp::gamma(1.0), 1.0);
  EXPECT_NEAR(sp::gamma(5.0), 24.0, 1e-13 * 24.0);
  EXPECT_NEAR(sp::gamma(0.5), 1.7724538509055160, 1e-15);
  EXPECT_NEAR(sp::gamma(0.5), std::sqrt(std::numbers::pi), 1e-15);
}

TEST(Gamma, AgreesWithMpfrAcrossRange) {
  for (double x = -169.75; x < 170.0; x += 0.731) {
    if (sp::is_nonpositive_integer(x)) continue;
    const double ref = mlgate::oracle::gamma(x);
    if (ref == 0.0 || !std::isfinite(ref)) continue;
    EXPECT_LE(rel(sp::gamma(x), ref), 1e-13) << "x = " << x;
  }
}

TEST(Gamma, PoleAndOverflowErrors) {
  EXPECT_EQ(error_code([] { sp::gamma(0.0); }), MathErrc::Pole);
  EXPECT_EQ(error_code([] { sp::gamma(-3.0); }), MathErrc::Pole);
  EXPECT_EQ(error_code([] { sp::gamma(-3.0 + 1e-13); }), MathErrc::Pole);
  EXPECT_EQ(error_code([] { sp::gamma(172.0); }), MathErrc::Overflow);
  EXPECT_NO_THROW(sp::gamma(-3.0 + 1e-9));
}

TEST(Rgamma, ZeroAtPoles) {
  EXPECT_EQ(sp::rgamma(0.0), 0.0);
  EXPECT_EQ(sp::rgamma(-3.0), 0.0);
  EXPECT_EQ(sp::rgamma(2.0), 1.0);
  EXPECT_GT(sp::rgamma(200.0), -1.0);
  EXPECT_TRUE(std::isfinite(sp::rgamma(200.0)));
}

TEST(Rgamma, ReciprocalOfGamma) {
  for (double x : {0.1, 0.5, 1.5, 4.2, -2.5}) {
    EXPECT_NEAR(sp::rgamma(x) * sp::gamma(x), 1.0, 1e-12) << x;
  }
}

TEST(Rgamma, LogFormMatchesDirect) {
  for (double x : {0.3, 2.5, 7.25, -0.5, -3.7}) {
    const auto lr = sp::log_rgamma(x);
    EXPECT_NEAR(lr.sign * std::exp(lr.log_abs), sp::rgamma(x), 1e-13 * std::abs(sp::rgamma(x)));
  }
  EXPECT_EQ(sp::log_rgamma(-4.0).sign, 0);
}

TEST(Gamma, RecurrenceOnGrid) {
  for (int i = 0; i < 100; ++i) {
    const double x = 0.1 + (50.0 - 0.1) * (i + 0.5) / 100.0;
    EXPECT_LE(rel(sp::gamma(x + 1.0), x * sp::gamma(x)), 1e-12) << x;
  }
}

TEST(Erf, Values) {
  EXPECT_EQ(sp::erf(0.0), 0.0);
  EXPECT_NEAR(sp::erf(10.0), 1.0, 1e-15);
  EXPECT_NEAR(sp::erf(1.0 / std::numbers::sqrt2), 0.6826894921370859, 1e-15);
  for (double x = -6.0; x <= 6.0; x += 0.173) {
    EXPECT_NEAR(sp::erf(x), mlgate::oracle::erf(x), 1e-14) << x;
    EXPECT_EQ(sp::erf(-x), -sp::erf(x));
    EXPECT_LE(std::abs(sp::erf(x)), 1.0);
  }
}

TEST(Erf, MonotoneOnGrid) {
  double prev = -2.0;
  for (double x = -8.0; x <= 8.0; x += 0.01) {
    const double v = sp::erf(x);
    EXPECT_GE(v, prev);
    prev = v;
  }
}

TEST(Softplus, Values) {
  EXPECT_NEAR(sp::softplus(0.0), 0.6931471805599453, 1e-16);
  const double tiny = sp::softplus(-40.0);
  EXPECT_GT(tiny, 0.0);
  EXPECT_NEAR(tiny, std::log1p(std::exp(-40.0)), 1e-30);
  EXPECT_NEAR(tiny, 4.248354255291589e-18, 1e-30);
  EXPECT_NEAR(sp::softplus(50.0), 50.0, 50.0 * 1e-15);
  EXPECT_TRUE(std::isfinite(sp::softplus(1000.0)));
}

TEST(Softplus, OddPartIsIdentity) {
  for (double x = -30.0; x <= 30.0; x += 0.37) {
    EXPECT_NEAR(sp::softplus(x) - sp::softplus(-x), x, 1e-12) << x;
  }
}

TEST(SafePow, Conventions) {
  EXPECT_EQ(sp::safe_pow(0.0, 0.0), 1.0);
  EXPECT_EQ(sp::safe_pow(-2.0, 3.0), -8.0);
  EXPECT_EQ(sp::safe_pow(0.0, 0.5), 0.0);
  EXPECT_EQ(error_code([] { sp::safe_pow(-2.0, 0.5); }), MathErrc::Domain);
  EXPECT_EQ(error_code([] { sp::safe_pow(0.0, -0.5); }), MathErrc::Singularity);
}

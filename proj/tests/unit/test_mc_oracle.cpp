#include <cmath>
#include <vector>

#include <boost/math/distributions/gamma.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/laguerre.hpp>
#include <gtest/gtest.h>

#include "msv/errors.hpp"
#include "msv/mc_oracle.hpp"

namespace {

using namespace msv;

const ModelParams kPaper{};
const HiddenState kState{0.0234, 0.0194};

McConfig small(std::size_t paths = 100000) {
  McConfig c;
  c.paths = paths;
  return c;
}

TEST(McParams, EtaNuConsistency) {
  EXPECT_NEAR(w3_from_eta_nu(-0.5, 0.433, 0.0096), 0.5 * 0.433 * std::sqrt(0.0096 / 2.0), 1e-15);
  const auto a = McModelParams::from_nu(kPaper, 0.2166);
  EXPECT_NEAR(w3_from_eta_nu(a.eta, a.nu, kPaper.epsilon), kPaper.w3_eps, 1e-15);
  EXPECT_LE(std::abs(a.eta), 1.0);
  EXPECT_THROW(McModelParams::from_nu(kPaper, 0.05).validate(), DomainError);
  auto bad = a;
  bad.base.w3_eps = 0.02;
  EXPECT_THROW(bad.validate(), DomainError);
}

TEST(McParams, CorrelationFactorReproducesTargets) {
  auto mp = McModelParams::from_eta_nu(kPaper, -0.6, 0.3);
  mp.base.rho = -0.7;
  const auto L = mp.correlation_factor();
  auto corr = [&](int i, int j) {
    double s = 0.0;
    for (int k = 0; k < 4; ++k) s += L[i][k] * L[j][k];
    return s;
  };
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(corr(i, i), 1.0, 1e-14);
  EXPECT_NEAR(corr(0, 1), -0.6, 1e-14);  // (W^Y, W^{X,1})
  EXPECT_NEAR(corr(2, 3), -0.7, 1e-14);  // (W^Z, W^{X,2})
  EXPECT_NEAR(corr(0, 2), 0.0, 1e-14);
  EXPECT_NEAR(corr(1, 3), 0.0, 1e-14);
}

TEST(McConfig, Validation) {
  const auto mp = McModelParams::from_nu(kPaper, 0.2166);
  McConfig c;
  EXPECT_NO_THROW(c.validate(mp));
  c.paths = 5000;
  EXPECT_THROW(c.validate(mp), ConfigError);
  c = {};
  c.dt = kPaper.epsilon / 10.0;
  EXPECT_THROW(c.validate(mp), ConfigError);
  c = {};
  c.scheme = "milstein";
  EXPECT_THROW(c.validate(mp), ConfigError);
  c = {};
  const double h = c.step_for(mp, 0.25);
  EXPECT_LE(h, kPaper.epsilon / 20.0);
  EXPECT_NEAR(0.25 / h, std::round(0.25 / h), 1e-9);
}

TEST(McOracle, DiscountedAssetIsMartingale) {
  const auto mp = McModelParams::from_nu(kPaper, 0.2166);
  const auto m = mc_terminal_moments(mp, kState, 2000, 0.25, small());
  const double disc = std::exp(-kPaper.r * 0.25);
  EXPECT_LE(std::abs(disc * m.x.mean - 2000.0), 3.0 * disc * m.x.standard_error);
  const std::vector<double> zero{0.0};
  const auto call0 = mc_price_spx_strikes(mp, kState, 2000, 0.25, zero, true, small());
  EXPECT_LE(std::abs(call0[0].mean - 2000.0), 3.0 * call0[0].standard_error);
}

TEST(McOracle, FactorMeansMatchClosedForms) {
  const auto mp = McModelParams::from_nu(kPaper, 0.2166);
  for (double t : {0.01, 0.1, 0.25}) {
    const auto m = mc_terminal_moments(mp, kState, 2000, t, small());
    EXPECT_LE(std::abs(m.z.mean - expected_z(kState.z, t, kPaper)), 3.0 * m.z.standard_error) << t;
  }
}

// The fast factor violates the Feller condition at these parameters, and full
// truncation then biases E[Y] by O(sqrt(dt)); the mean matches once the step
// is refined well below the default.
TEST(McOracle, FastFactorMeanConvergesWithStep) {
  const auto mp = McModelParams::from_nu(kPaper, 0.2166);
  const double t = 0.1;
  const double exact = expected_y(kState, t, kPaper);
  auto cfg = small();
  const auto coarse = mc_terminal_moments(mp, kState, 2000, t, cfg);
  cfg.dt = cfg.step_for(mp, t) / 16.0;
  const auto fine = mc_terminal_moments(mp, kState, 2000, t, cfg);
  EXPECT_LE(std::abs(fine.y.mean - exact), 3.0 * fine.y.standard_error);
  EXPECT_LT(std::abs(fine.y.mean - exact), std::abs(coarse.y.mean - exact));
}

TEST(McOracle, DeterministicVarianceLimit) {
  McModelParams mp;
  mp.base = kPaper;
  mp.base.sigma = 1e-12;
  mp.base.rho = 0.0;
  mp.base.w3_eps = 0.0;
  mp.eta = 0.0;
  mp.nu = 1e-12;
  const HiddenState st{0.03, 0.02};
  const double t = 0.25;
  const auto m = mc_terminal_moments(mp, st, 2000, t, small(20000));
  EXPECT_NEAR(m.y.mean, expected_y(st, t, mp.base), 1e-6);
  EXPECT_NEAR(m.z.mean, expected_z(st.z, t, mp.base), 1e-6);
  EXPECT_LE(std::abs(m.x.mean - 2000 * std::exp(kPaper.r * t)), 3.0 * m.x.standard_error);
}

TEST(McOracle, ReproducibleForFixedSeed) {
  const auto mp = McModelParams::from_nu(kPaper, 0.2166);
  const std::vector<double> k{1900, 2000, 2100};
  const auto a = mc_price_spx_strikes(mp, kState, 2000, 30.0 / 365.0, k, true, small());
  const auto b = mc_price_spx_strikes(mp, kState, 2000, 30.0 / 365.0, k, true, small());
  for (std::size_t i = 0; i < k.size(); ++i) {
    EXPECT_EQ(a[i].mean, b[i].mean);
    EXPECT_EQ(a[i].standard_error, b[i].standard_error);
    EXPECT_GT(a[i].standard_error, 0.0);
  }
  auto other = small();
  other.seed += 1;
  const auto c = mc_price_spx_strikes(mp, kState, 2000, 30.0 / 365.0, k, true, other);
  EXPECT_NE(a[1].mean, c[1].mean);
}

TEST(McOracle, SpxPutCallParity) {
  const auto mp = McModelParams::from_nu(kPaper, 0.2166);
  const std::vector<double> k{1900, 2100};
  const auto calls = mc_price_spx_strikes(mp, kState, 2000, 0.1, k, true, small());
  const auto puts = mc_price_spx_strikes(mp, kState, 2000, 0.1, k, false, small());
  const auto m = mc_terminal_moments(mp, kState, 2000, 0.1, small());
  const double disc = std::exp(-kPaper.r * 0.1);
  for (std::size_t i = 0; i < k.size(); ++i)
    EXPECT_NEAR(calls[i].mean - puts[i].mean, disc * (m.x.mean - k[i]), 1e-8);
}

// Halving the step: the two estimates use independent draws, so compare
// against their combined standard error.
TEST(McOracle, StepRefinementIsWithinNoise) {
  const auto mp = McModelParams::from_nu(kPaper, 0.2166);
  const std::vector<double> k{20.0};
  auto coarse = small(200000);
  coarse.dt = coarse.step_for(mp, 30.0 / 365.0);
  auto fine = coarse;
  fine.dt = 0.5 * coarse.dt;
  const auto a = mc_price_vix_strikes(mp, kState, 30.0 / 365.0, k, true, coarse);
  const auto b = mc_price_vix_strikes(mp, kState, 30.0 / 365.0, k, true, fine);
  EXPECT_LE(std::abs(a[0].mean - b[0].mean), 3.0 * std::hypot(a[0].standard_error, b[0].standard_error));
}

// Prices depend on (eta, nu) only through w3_eps up to the approximation order.
TEST(McOracle, SplitInvarianceAtEqualW3) {
  ModelParams base = kPaper;
  base.epsilon = 0.002;
  const auto a = McModelParams::from_eta_nu(base, -0.9, 0.1);
  const auto b = McModelParams::from_eta_nu(base, -0.3, 0.3);
  ASSERT_NEAR(a.base.w3_eps, b.base.w3_eps, 1e-15);
  const std::vector<double> k{1900, 2000, 2100};
  const auto pa = mc_price_spx_strikes(a, kState, 2000, 30.0 / 365.0, k, true, small());
  const auto pb = mc_price_spx_strikes(b, kState, 2000, 30.0 / 365.0, k, true, small());
  for (std::size_t i = 0; i < k.size(); ++i) {
    const double slack = 3.0 * std::hypot(pa[i].standard_error, pb[i].standard_error) + base.epsilon * k[i] * 1e-2;
    EXPECT_LE(std::abs(pa[i].mean - pb[i].mean), slack) << "K=" << k[i];
  }
}

TEST(McOracle, VixPayoffUsesExactWeights) {
  const auto mp = McModelParams::from_nu(kPaper, 0.2166);
  const std::vector<double> k{0.0};
  // At a tiny horizon VIX_T is the current model VIX.
  auto cfg = small(20000);
  const auto p = mc_price_vix_strikes(mp, kState, 1e-4, k, true, cfg);
  EXPECT_NEAR(p[0].mean, std::exp(-kPaper.r * 1e-4) * vix_from_state(kState, kPaper), 0.05);
}

// Boost re-computation of <(y - z) psi_n> with psi_n built from Laguerre
// polynomials; the library has its own quadrature and substitution.
double boost_spectral(double nu, double z, int n) {
  // boost's associated Laguerre takes an unsigned order, so the shape must be integral
  const double gamma = std::round(z / (nu * nu));
  boost::math::gamma_distribution<double> law(gamma, nu * nu);
  const double norm = std::exp(0.5 * (std::lgamma(n + 1.0) + std::lgamma(gamma) - std::lgamma(n + gamma)));
  auto f = [&](double y) {
    return (y - z) * norm * boost::math::laguerre(unsigned(n), unsigned(gamma) - 1u, y / (nu * nu)) * boost::math::pdf(law, y);
  };
  const double upper = z + 60.0 * nu * std::sqrt(z);
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, upper, 10, 1e-13);
}

TEST(Spectral, CenteringAndFirstCoefficient) {
  for (const auto [nu, z] : {std::pair{0.2166, 0.0194}, std::pair{0.05, 0.04}, std::pair{0.4, 0.04}}) {
    EXPECT_LT(std::abs(spectral_coefficient_check(nu, z, 0)), 1e-10);
    EXPECT_NEAR(spectral_coefficient_check(nu, z, 1) / (-nu * std::sqrt(z)), 1.0, 1e-8);
    EXPECT_LT(std::abs(spectral_coefficient_check(nu, z, 2)), 1e-8);
    EXPECT_LT(std::abs(spectral_coefficient_check(nu, z, 3)), 1e-8);
  }
}

TEST(Spectral, AgreesWithBoostWhenDensityIsBounded) {
  const double nu = 0.05;
  const double z = 0.04;  // shape 16
  for (int n = 0; n <= 3; ++n) EXPECT_NEAR(spectral_coefficient_check(nu, z, n), boost_spectral(nu, z, n), 1e-9) << n;
}

}  // namespace

#include <cmath>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include "msv/errors.hpp"
#include "msv/implied_vol.hpp"
#include "msv/vix_pricer.hpp"
#include "oracles.hpp"

namespace {

using namespace msv;

double ref_normal_call(double f, double k, double tau, double s) {
  const double sd = s * std::sqrt(tau);
  const double m = (f - k) / sd;
  return (f - k) * 0.5 * std::erfc(-m / std::numbers::sqrt2) + sd * std::exp(-0.5 * m * m) / std::sqrt(2.0 * std::numbers::pi);
}

TEST(NormalModel, Examples) {
  const double tau = 30.0 / 365.0;
  EXPECT_NEAR(vix_normal_price(20, 18, tau, 6), ref_normal_call(20, 18, tau, 6), 1e-13);
  EXPECT_NEAR(vix_normal_price(20, 20, tau, 6), 6 * std::sqrt(tau) / std::sqrt(2 * std::numbers::pi), 1e-13);
  EXPECT_DOUBLE_EQ(vix_normal_price(20, 18, tau, 0.0), 2.0);
  EXPECT_DOUBLE_EQ(vix_normal_price(20, 22, tau, 0.0), 0.0);
  EXPECT_NEAR(vix_normal_price(20, 18, tau, 1e-12), 2.0, 1e-12);
}

// Strikes placed at -2..2 standard deviations, where the inversion is well posed.
TEST(NormalModel, RoundTrip) {
  for (double s : {1.0, 5.0, 10.0}) {
    for (double tau : {0.02, 30.0 / 365.0, 0.5}) {
      for (double m : {-2.0, -1.0, 0.0, 1.0, 2.0}) {
        const double k = 20.0 + m * s * std::sqrt(tau);
        const auto iv = vix_normal_implied_vol(vix_normal_price(20, k, tau, s), 20, k, tau);
        ASSERT_TRUE(iv.converged);
        EXPECT_LE(iv.iterations, kImpliedVolBudget);
        EXPECT_NEAR(iv.implied_vol, s, 1e-8) << "K=" << k << " tau=" << tau;
      }
    }
  }
}

TEST(NormalModel, NoRootAtIntrinsic) {
  EXPECT_THROW((void)vix_normal_implied_vol(2.0, 20, 18, 0.1), NoRootError);
  EXPECT_THROW((void)vix_normal_implied_vol(0.0, 20, 22, 0.1), NoRootError);
  EXPECT_THROW((void)vix_normal_implied_vol(std::nan(""), 20, 22, 0.1), NoRootError);
}

TEST(NormalModel, MonotoneInVol) {
  double prev = 0.0;
  for (double s = 0.5; s < 40; s *= 1.3) {
    const double p = vix_normal_price(20, 23, 0.1, s);
    EXPECT_GT(p, prev);
    prev = p;
  }
}

TEST(BlackScholes, MatchesIndependentFormula) {
  for (double s : {0.1, 0.2, 0.5}) EXPECT_NEAR(bs_call_price(2000, 2100, 0.3, 0.02, s), oracle::bs_call(2000, 2100, 0.3, 0.02, s), 1e-9);
}

TEST(BlackScholes, RoundTrip) {
  for (double s : {0.1, 0.2, 0.5}) {
    for (double tau : {0.05, 0.25, 1.0}) {
      for (double m : {-2.0, -1.0, 0.0, 1.0, 2.0}) {
        const double k = 2000.0 * std::exp(m * s * std::sqrt(tau));
        const auto iv = bs_implied_vol(oracle::bs_call(2000, k, tau, 0.02, s), 2000, k, tau, 0.02);
        ASSERT_TRUE(iv.converged);
        EXPECT_NEAR(iv.implied_vol, s, 1e-8) << "K=" << k << " tau=" << tau;
      }
    }
  }
}

TEST(BlackScholes, AtTheMoneyApproximation) {
  const auto iv = bs_implied_vol(0.07966 * 2000, 2000, 2000, 1.0, 0.0);
  EXPECT_NEAR(iv.implied_vol, 0.20, 1e-4);
}

TEST(BlackScholes, NoRootOutsideBand) {
  const double lower = 2000 - 1900 * std::exp(-0.02 * 0.25);
  EXPECT_THROW((void)bs_implied_vol(lower, 2000, 1900, 0.25, 0.02), NoRootError);
  EXPECT_THROW((void)bs_implied_vol(2000, 2000, 1900, 0.25, 0.02), NoRootError);
}

TEST(BlackScholes, VegaMatchesFiniteDifference) {
  const double h = 1e-5;
  const double fd = (bs_call_price(2000, 2100, 0.3, 0.02, 0.2 + h) - bs_call_price(2000, 2100, 0.3, 0.02, 0.2 - h)) / (2 * h);
  EXPECT_NEAR(bs_vega(2000, 2100, 0.3, 0.02, 0.2), fd, 1e-5);
}

TEST(Surface, CsvLayout) {
  SurfaceGrid g{{15, 20}, {0.1, 0.25}, {{1.5, 2.5}, {3, 4}}};
  std::ostringstream os;
  write_surface_csv(os, g);
  EXPECT_EQ(os.str(), "strike,0.1,0.25\n15,1.5,2.5\n20,3,4\n");
  g.values.pop_back();
  EXPECT_THROW(write_surface_csv(os, g), DataError);
}

TEST(Surface, ModelPricesInvertToFiniteVols) {
  const ModelParams p{};
  for (double k : {16.0, 20.0, 24.0, 28.0}) {
    const auto price = price_vix_call({k, 30.0 / 365.0, true}, {0.0234, 0.0194}, p);
    const double fwd_price = std::exp(p.r * 30.0 / 365.0) * price.total;
    const auto iv = vix_normal_implied_vol(fwd_price, vix_from_state({0.0234, 0.0194}, p), k, 30.0 / 365.0);
    EXPECT_TRUE(iv.converged);
    EXPECT_GT(iv.implied_vol, 0.0);
    EXPECT_TRUE(std::isfinite(iv.implied_vol));
  }
}

// The correction raises short-dated high strikes relative to low strikes when
// y > z and does the reverse when y < z.
TEST(Surface, VixDifferenceSlopeFlipsWithStateOrdering) {
  SurfaceRequest req;
  req.strikes = {18, 20, 22, 24, 26, 28};
  req.maturities = {10.0 / 365.0};
  req.state = {0.0234, 0.0194};
  const auto above = implied_vol_surface(req, {});
  req.state = {0.0110, 0.0203};
  const auto below = implied_vol_surface(req, {});
  for (std::size_t i = 1; i < req.strikes.size(); ++i) {
    EXPECT_GT(above.values[i][0], above.values[i - 1][0]);
    EXPECT_LT(below.values[i][0], below.values[i - 1][0]);
  }
  EXPECT_LT(above.values.front()[0], 0.0);
  EXPECT_GT(above.values.back()[0], 0.0);
  for (const auto& row : below.values) EXPECT_TRUE(std::isfinite(row[0]));
}

TEST(Surface, SpxDifferenceIsBounded) {
  SurfaceRequest req;
  req.vix = false;
  req.strikes = {1800, 1900, 2000, 2100};
  req.maturities = {30.0 / 365.0, 0.25};
  const auto grid = implied_vol_surface(req, {});
  for (const auto& row : grid.values)
    for (double v : row) {
      EXPECT_TRUE(std::isfinite(v));
      EXPECT_LT(std::abs(v), 0.2);
    }
}

}  // namespace

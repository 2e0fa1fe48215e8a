#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "msv/errors.hpp"
#include "msv/mc_oracle.hpp"
#include "msv/ncx2.hpp"
#include "msv/quadrature.hpp"
#include "msv/vix_pricer.hpp"
#include "oracles.hpp"

namespace {

using namespace msv;

const ModelParams kPaper{};
const HiddenState kStateA{0.0234, 0.0194};
const HiddenState kStateB{0.0110, 0.0203};

// Weights re-derived from their closed forms.
struct RefWeights {
  double a1, a2s, a4s;
};

RefWeights ref_weights(const ModelParams& p) {
  const double t0 = 30.0 / 365.0;
  const double a2s = 2.0 / (p.kappa * t0) * (1.0 - std::exp(-p.kappa * t0));
  return {p.epsilon / t0 * (1.0 - std::exp(-t0 / p.epsilon)), a2s, 1.0 - a2s};
}

double ref_h0(double v, const ModelParams& p, double k) {
  const auto w = ref_weights(p);
  return std::max(0.0, 100.0 * std::sqrt(w.a2s * v + (1.0 + w.a4s) * p.theta) - k);
}

double ref_h1(double v, const HiddenState& s, double tau, const ModelParams& p, double k) {
  const auto w = ref_weights(p);
  const double root = std::sqrt(w.a2s * v + (1.0 + w.a4s) * p.theta);
  if (100.0 * root < k) return 0.0;
  return 100.0 *
         (2.0 * std::exp(-tau / p.epsilon) * w.a1 * (s.y - s.z) + p.kappa * p.epsilon * w.a2s * (v - p.theta)) /
         (4.0 * root);
}

struct GridCase {
  double dof, lambda;
};

class Ncx2Grid : public ::testing::TestWithParam<GridCase> {};

TEST_P(Ncx2Grid, NormalizationAndMean) {
  const auto [dof, lambda] = GetParam();
  const Ncx2Params p{dof, lambda, 1.0};
  const double hi = dof + lambda + 60.0 * std::sqrt(2.0 * (dof + 2.0 * lambda)) + 60.0;
  // Split near the origin where the density is singular for dof < 2.
  auto mass = [&](auto&& g) {
    const double split = std::min(1.0, hi);
    return quad::integrate(g, 0.0, split, 1e-13, 1e-12, 2000000).value +
           quad::integrate(g, split, hi, 1e-13, 1e-12, 2000000).value;
  };
  const double norm = mass([&](double z) { return ncx2_pdf(z, p); });
  const double mean = mass([&](double z) { return z * ncx2_pdf(z, p); });
  EXPECT_NEAR(norm, 1.0, 1e-8);
  EXPECT_NEAR(mean, dof + lambda, 1e-6);
}

INSTANTIATE_TEST_SUITE_P(Grid, Ncx2Grid,
                         ::testing::Values(GridCase{0.5, 0.0}, GridCase{0.5, 1.0}, GridCase{0.5, 100.0},
                                           GridCase{1.25, 10.0}, GridCase{2.0, 0.0}, GridCase{2.0, 30.0},
                                           GridCase{5.0, 5.0}, GridCase{12.0, 60.0}, GridCase{50.0, 0.0},
                                           GridCase{50.0, 100.0}));

TEST(Ncx2, MatchesBoost) {
  for (double dof : {0.7, 2.5, 24.0}) {
    for (double lambda : {0.3, 8.0, 70.0}) {
      boost::math::non_central_chi_squared d(dof, lambda);
      for (double z : {0.05, 1.0, 7.5, 40.0, 120.0}) {
        const double ref = boost::math::pdf(d, z);
        EXPECT_NEAR(ncx2_pdf(z, {dof, lambda, 1.0}), ref, 1e-10 * std::max(ref, 1e-6));
      }
    }
  }
}

TEST(Ncx2, CentralCase) {
  for (double dof : {0.8, 3.0, 11.0}) {
    for (double z : {0.1, 1.0, 4.0, 20.0}) {
      const double ref =
          std::exp((0.5 * dof - 1.0) * std::log(z) - 0.5 * z - 0.5 * dof * std::log(2.0) - std::lgamma(0.5 * dof));
      EXPECT_NEAR(ncx2_pdf(z, {dof, 0.0, 1.0}) / ref, 1.0, 1e-12);
    }
  }
}

TEST(Ncx2, CirTransitionReproducesConditionalMean) {
  const auto t = cir_transition(0.0194, 0.25, 3.58, 0.021, 0.347);
  const double ez = 0.0194 * std::exp(-3.58 * 0.25) + 0.021 * (1.0 - std::exp(-3.58 * 0.25));
  EXPECT_NEAR(t.scale * (t.dof + t.noncentrality), ez, 1e-15);
  EXPECT_NEAR(t.dof, 4.0 * 3.58 * 0.021 / (0.347 * 0.347), 1e-12);
}

TEST(Ncx2, SeriesBudget) {
  EXPECT_THROW((void)ncx2_pdf(5000.0, {2.0, 5000.0, 1.0}, 5), SeriesError);
}

TEST(PayoffH0, Examples) {
  const double th = kPaper.theta;
  EXPECT_NEAR(payoff_h0(th, kPaper, 15.0), 100.0 * std::sqrt(2.0 * th) - 15.0, 1e-12);
  EXPECT_NEAR(payoff_h0(th, kPaper, 15.0), 5.494, 5e-4);
  const double vstar = vix_exercise_threshold(kPaper, 22.0);
  EXPECT_NEAR(payoff_h0(vstar, kPaper, 22.0), 0.0, 1e-12);
  EXPECT_EQ(payoff_h0(0.9 * vstar, kPaper, 22.0), 0.0);
  for (double v : {0.0, 0.01, 0.1}) EXPECT_NEAR(payoff_h0(v, kPaper, 0.0), ref_h0(v, kPaper, 0.0), 1e-12);
}

TEST(PayoffH1, Examples) {
  const double th = kPaper.theta;
  EXPECT_EQ(payoff_h1star(th, {0.02, 0.02}, 0.1, kPaper, 10.0), 0.0);
  // tau / eps large: the fast term underflows and only the slow term survives.
  const auto w = ref_weights(kPaper);
  const double v = 0.03;
  const double root = std::sqrt(w.a2s * v + (1.0 + w.a4s) * th);
  const double slow = 100.0 * kPaper.kappa * kPaper.epsilon * w.a2s * (v - th) / (4.0 * root);
  ModelParams tiny = kPaper;
  tiny.epsilon = 1e-4;
  EXPECT_LT(std::exp(-0.25 / tiny.epsilon), 1e-300);
  const auto wt = ref_weights(tiny);
  const double root_t = std::sqrt(wt.a2s * v + (1.0 + wt.a4s) * th);
  EXPECT_NEAR(payoff_h1star(v, kStateA, 0.25, tiny, 15.0),
              100.0 * tiny.kappa * tiny.epsilon * wt.a2s * (v - th) / (4.0 * root_t), 1e-15);
  EXPECT_NEAR(payoff_h1star(v, kStateA, 0.25, kPaper, 15.0), slow, 1e-9);
  EXPECT_NEAR(payoff_h1star(0.03, kStateA, 30.0 / 365.0, kPaper, 18.0), ref_h1(0.03, kStateA, 30.0 / 365.0, kPaper, 18.0),
              1e-14);
}

TEST(VixCall, MatchesBoostDensityOracle) {
  const double tau = 30.0 / 365.0;
  for (const auto& st : {kStateA, kStateB}) {
    for (double k : {0.0, 15.0, 20.0, 25.0}) {
      const auto got = price_vix_call({k, tau, true}, st, kPaper);
      const double lower = std::max(0.0, vix_exercise_threshold(kPaper, k));
      const double p0 = oracle::cir_expectation([&](double v) { return ref_h0(v, kPaper, k); }, lower, st.z, tau,
                                                kPaper.kappa, kPaper.theta, kPaper.sigma, kPaper.r);
      const double p1 = oracle::cir_expectation([&](double v) { return ref_h1(v, st, tau, kPaper, k); }, lower,
                                                st.z, tau, kPaper.kappa, kPaper.theta, kPaper.sigma, kPaper.r);
      EXPECT_NEAR(got.leading, p0, 1e-7 * (1.0 + p0)) << "K=" << k;
      EXPECT_NEAR(got.correction, p1, 1e-7 * (1.0 + std::abs(p1))) << "K=" << k;
    }
  }
}

TEST(VixCall, MonotoneAndConvexInStrike) {
  std::vector<VixOptionSpec> specs;
  for (double k = 10.0; k <= 40.0; k += 0.5) specs.push_back({k, 0.1, true});
  for (const auto& st : {kStateA, kStateB}) {
    const auto prices = price_vix_batch(specs, st, kPaper);
    for (std::size_t i = 1; i < prices.size(); ++i) EXPECT_LE(prices[i].total, prices[i - 1].total + 1e-8);
    for (std::size_t i = 1; i + 1 < prices.size(); ++i)
      EXPECT_GE(prices[i - 1].total - 2 * prices[i].total + prices[i + 1].total, -1e-8);
    for (const auto& p : prices) EXPECT_GE(p.total, 0.0);
  }
  const auto p15 = price_vix_call({15, 30.0 / 365.0, true}, kStateA, kPaper).total;
  const auto p20 = price_vix_call({20, 30.0 / 365.0, true}, kStateA, kPaper).total;
  const auto p25 = price_vix_call({25, 30.0 / 365.0, true}, kStateA, kPaper).total;
  EXPECT_GT(p15, p20);
  EXPECT_GT(p20, p25);
}

TEST(VixCall, CorrectionIncreasingInFastFactor) {
  const double tau = 3.0 * kPaper.epsilon;
  for (double k : {15.0, 20.0, 25.0}) {
    double prev = -INFINITY;
    for (double y = 0.005; y <= 0.05; y += 0.005) {
      const double c = price_vix_call({k, tau, true}, {y, 0.0194}, kPaper).correction;
      EXPECT_GT(c, prev);
      prev = c;
    }
  }
}

TEST(VixPut, ParityAgainstForward) {
  const double tau = 0.2;
  const auto fwd = price_vix_call({0.0, tau, true}, kStateA, kPaper);
  const double disc = std::exp(-kPaper.r * tau);
  for (double k : {15.0, 20.0, 25.0}) {
    const auto c = price_vix_call({k, tau, true}, kStateA, kPaper);
    const auto p = price_vix_put({k, tau, false}, kStateA, kPaper);
    EXPECT_NEAR(c.total - p.total, fwd.total - k * disc, 1e-10);
    EXPECT_GE(p.total, -1e-10);
  }
}

TEST(VixCall, ZeroStrikeMatchesMonteCarlo) {
  const auto mp = McModelParams::from_nu(kPaper, 0.2166);
  McConfig cfg;
  cfg.paths = 100000;
  const double tau = 30.0 / 365.0;
  const std::vector<double> strikes{0.0};
  const auto mc = mc_price_vix_strikes(mp, kStateB, tau, strikes, true, cfg);
  const double an = price_vix_call({0.0, tau, true}, kStateB, kPaper).total;
  EXPECT_LE(std::abs(an - mc[0].mean), 3.0 * mc[0].standard_error + 1e-2)
      << "analytic " << an << " mc " << mc[0].mean << " se " << mc[0].standard_error;
}

TEST(VixCall, RejectsBadInput) {
  EXPECT_THROW((void)price_vix_call({-1.0, 0.1, true}, kStateA, kPaper), DomainError);
  EXPECT_THROW((void)price_vix_call({20.0, 0.0, true}, kStateA, kPaper), DomainError);
  EXPECT_THROW((void)price_vix_call({20.0, 0.1, true}, {-0.01, 0.02}, kPaper), DomainError);
}

}  // namespace

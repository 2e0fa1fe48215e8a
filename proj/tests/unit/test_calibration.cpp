#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "msv/calibration.hpp"
#include "msv/errors.hpp"
#include "msv/optimizer.hpp"
#include "msv/parallel.hpp"
#include "msv/synthetic.hpp"
#include "msv/vix_pricer.hpp"

namespace {

using namespace msv;

const ModelParams kPaper{};

// Two dates, a trimmed option grid: small enough for unit-test runtimes.
SyntheticConfig small_config(bool multiscale) {
  SyntheticConfig s;
  s.multiscale = multiscale;
  s.dates = 2;
  s.states = {{0.0234, 0.0194}, {0.0110, 0.0203}};
  s.spx_expiry_days = {30, 90};
  s.spx_moneyness = {0.95, 1.0, 1.05};
  s.vix_expiry_days = {14, 42};
  s.vix_strikes = {17.5, 20.0, 22.5};
  return s;
}

CalibrationData data_for(const SyntheticConfig& s) {
  const auto quotes = generate_synthetic_quotes(s);
  return group_by_date(quotes);
}

CalibrationDate date_with_vix_quotes(const HiddenState& st, const ModelParams& p, std::vector<double> strikes) {
  CalibrationDate d;
  d.date = parse_date("2017-03-01");
  d.vix_level = vix_from_state(st, p);
  d.spx_level = 2000;
  for (double k : strikes) {
    MarketOption o;
    o.quote.trade_date = d.date;
    o.quote.expiry = parse_date("2017-03-22");
    o.quote.underlying = Underlying::vix;
    o.quote.strike = k;
    o.quote.underlying_level = d.vix_level;
    o.tau = o.quote.tau();
    o.quote.mid_price = price_vix({k, o.tau, true}, st, p).total;
    d.vix.push_back(o);
  }
  return d;
}

TEST(WeightedSse, Examples) {
  const std::vector<double> m{1.0, 2.0, 3.0};
  EXPECT_EQ(weighted_sse(m, m), 0.0);
  const std::vector<double> a{1.1};
  const std::vector<double> b{1.0};
  EXPECT_NEAR(weighted_sse(a, b), std::pow(0.1 / 1.1, 2), 1e-15);
  EXPECT_NEAR(weighted_sse(a, b), 0.008264, 1e-6);
  const std::vector<double> a2{2.2};
  const std::vector<double> b2{2.0};
  EXPECT_NE(weighted_sse(a2, b2), weighted_sse(a, b));
  const std::vector<double> shorter{1.0, 2.0};
  EXPECT_THROW((void)weighted_sse(m, shorter), DataError);
}

TEST(Config, ValidatesBoundsAndFloor) {
  CalibrationConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.weight_floor = 0.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = {};
  cfg.bounds.kappa = {5.0, 1.0, false, true};
  EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(Optimizer, LogitTransformRoundTrip) {
  const Bound b{-1.0, 0.0, true, true};
  for (double x : {-0.999, -0.5, -0.01}) EXPECT_NEAR(to_bounded(to_unbounded(x, b), b), x, 1e-12);
  EXPECT_TRUE(b.contains(to_bounded(50.0, b)));
  EXPECT_TRUE(b.contains(to_bounded(-50.0, b)));
}

TEST(Optimizer, FindsBoundarySolution) {
  auto f = [](const std::vector<double>& x) { return (x[0] + 2.0) * (x[0] + 2.0) + (x[1] - 0.3) * (x[1] - 0.3); };
  const auto r = minimize_bounded(f, {-0.5, 0.5}, {{-1.0, 0.0, true, true}, {0.0, 1.0, false, true}});
  EXPECT_EQ(r.x[0], -1.0);
  EXPECT_NEAR(r.x[1], 0.3, 1e-5);
  for (std::size_t i = 1; i < r.trace.size(); ++i) EXPECT_LE(r.trace[i], r.trace[i - 1]);
}

TEST(Optimizer, GoldenSectionWithEndpoints) {
  const auto m = golden_section([](double x) { return (x - 0.7) * (x - 0.7); }, 0.0, 1.0, 1e-10, 200);
  EXPECT_NEAR(m.x, 0.7, 1e-6);
  const auto e = golden_section([](double x) { return x; }, 0.0, 1.0, 1e-10, 200);
  EXPECT_EQ(e.x, 0.0);
}

TEST(InnerFit, RecoversState) {
  for (const HiddenState st : {HiddenState{0.0234, 0.0194}, HiddenState{0.0110, 0.0203}}) {
    const auto d = date_with_vix_quotes(st, kPaper, {17.5, 20.0, 22.5});
    const auto got = inner_state_fit(d, kPaper);
    EXPECT_NEAR(got.y, st.y, 1e-3);
    EXPECT_NEAR(got.z, st.z, 1e-3);
    EXPECT_NEAR(vix_from_state(got, kPaper) / d.vix_level, 1.0, 1e-10);
  }
}

TEST(InnerFit, TwoOptionsAndSingleOption) {
  const HiddenState st{0.0234, 0.0194};
  const auto two = inner_state_fit(date_with_vix_quotes(st, kPaper, {18.0, 22.0}), kPaper);
  EXPECT_NEAR(two.y, st.y, 1e-3);
  EXPECT_NEAR(two.z, st.z, 1e-3);
  const auto one = inner_state_fit(date_with_vix_quotes(st, kPaper, {20.0}), kPaper);
  EXPECT_GE(one.y, 0.0);
  EXPECT_GE(one.z, 0.0);
}

TEST(InnerFit, BoundaryOfFeasibleInterval) {
  // A state on the z = 0 edge: the bracket end is evaluated without throwing.
  const HiddenState edge{0.06, 0.0};
  const auto d = date_with_vix_quotes(edge, kPaper, {20.0, 25.0});
  const auto got = inner_state_fit(d, kPaper);
  EXPECT_GE(got.z, 0.0);
  EXPECT_NEAR(vix_from_state(got, kPaper) / d.vix_level, 1.0, 1e-10);
}

TEST(InnerFit, InfeasibleLevelThrows) {
  auto d = date_with_vix_quotes({0.02, 0.02}, kPaper, {20.0});
  d.vix_level = 5.0;
  EXPECT_THROW((void)inner_state_fit(d, kPaper), InfeasibleStateError);
}

TEST(GroupByDate, DropsDatesWithoutVix) {
  auto quotes = generate_synthetic_quotes(small_config(true));
  const Date first = quotes.front().trade_date;
  std::erase_if(quotes, [&](const OptionQuote& q) { return q.trade_date == first && q.underlying == Underlying::vix; });
  const auto data = group_by_date(quotes);
  EXPECT_EQ(data.dates.size(), 1u);
  EXPECT_FALSE(data.warnings.empty());
}

TEST(CalibrateHeston, NoiselessRecovery) {
  const auto data = data_for(small_config(false));
  const HestonParams truth{};
  const auto res = calibrate_heston(data);
  EXPECT_NEAR(res.heston.kappa / truth.kappa, 1.0, 0.05);
  EXPECT_NEAR(res.heston.theta / truth.theta, 1.0, 0.05);
  EXPECT_NEAR(res.heston.sigma / truth.sigma, 1.0, 0.05);
  EXPECT_NEAR(res.heston.rho / truth.rho, 1.0, 0.05);
  EXPECT_EQ(res.skipped_dates, 0u);
  for (std::size_t i = 1; i < res.step1.trace.size(); ++i) EXPECT_LE(res.step1.trace[i], res.step1.trace[i - 1]);
}

TEST(CalibrateHeston, SingleOptionPerUnderlying) {
  auto s = small_config(false);
  s.dates = 1;
  s.spx_expiry_days = {30};
  s.spx_moneyness = {1.0};
  s.vix_expiry_days = {21};
  s.vix_strikes = {15.0};
  const auto res = calibrate_heston(data_for(s));
  EXPECT_LT(res.step1.objective, 1e-8);
  // one VIX quote does not pin (kappa, theta, sigma), so z and hence the SPX fit stay off the truth
  EXPECT_TRUE(std::isfinite(res.step2.objective));
  ASSERT_EQ(res.feasible.size(), 1u);
  EXPECT_TRUE(res.feasible[0]);
}

class MsvFit : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    auto s = small_config(true);
    s.msv.w3_eps = 0.0;
    data_ = new CalibrationData(data_for(s));
    result_ = new CalibrationResult(calibrate_msv(*data_));
  }
  static void TearDownTestSuite() {
    delete result_;
    delete data_;
  }
  static CalibrationData* data_;
  static CalibrationResult* result_;
};

CalibrationData* MsvFit::data_ = nullptr;
CalibrationResult* MsvFit::result_ = nullptr;

TEST_F(MsvFit, NullCorrectionRecovered) {
  EXPECT_NEAR(result_->params.w3_eps, 0.0, 0.002);
  EXPECT_NEAR(result_->params.kappa / kPaper.kappa, 1.0, 0.05);
  EXPECT_NEAR(result_->params.theta / kPaper.theta, 1.0, 0.05);
  EXPECT_NEAR(result_->params.sigma / kPaper.sigma, 1.0, 0.05);
  EXPECT_NEAR(result_->params.epsilon / kPaper.epsilon, 1.0, 0.25);
}

TEST_F(MsvFit, StatesSatisfyVixConstraint) {
  ASSERT_EQ(result_->states.size(), data_->dates.size());
  for (std::size_t i = 0; i < data_->dates.size(); ++i) {
    ASSERT_TRUE(result_->feasible[i]);
    const auto& st = result_->states[i];
    EXPECT_GE(st.y, 0.0);
    EXPECT_GE(st.z, 0.0);
    EXPECT_NEAR(vix_from_state(st, result_->params) / data_->dates[i].vix_level, 1.0, 1e-10);
  }
}

// Step 2 only moves (rho, w3_eps): the step-1 objective and every state are
// reproduced from the final parameters.
TEST_F(MsvFit, StepTwoLeavesStepOneOutputsAlone) {
  const CalibrationConfig cfg;
  double total = 0.0;
  for (std::size_t i = 0; i < data_->dates.size(); ++i) {
    total += date_vix_objective(data_->dates[i], result_->states[i], result_->params, cfg);
    const auto again = inner_state_fit(data_->dates[i], result_->params, cfg);
    EXPECT_EQ(again.y, result_->states[i].y);
    EXPECT_EQ(again.z, result_->states[i].z);
  }
  EXPECT_NEAR(total, result_->step1.objective, 1e-12 + 1e-9 * result_->step1.objective);
}

TEST_F(MsvFit, TracesAreMonotone) {
  for (const auto* t : {&result_->step1.trace, &result_->step2.trace})
    for (std::size_t i = 1; i < t->size(); ++i) EXPECT_LE((*t)[i], (*t)[i - 1]);
}

TEST_F(MsvFit, ReportCountsEveryOption) {
  EXPECT_EQ(result_->report.option_count(), flatten_quotes(*data_).size());
}

TEST(CalibrateHeston, DeterministicAcrossThreadCounts) {
  const auto data = data_for(small_config(false));
  set_worker_count(1);
  const auto a = calibrate_heston(data);
  const auto b = calibrate_heston(data);
  set_worker_count(4);
  const auto c = calibrate_heston(data);
  set_worker_count(0);
  EXPECT_EQ(a.step1.objective, b.step1.objective);
  EXPECT_EQ(a.heston.kappa, b.heston.kappa);
  EXPECT_EQ(a.heston.rho, b.heston.rho);
  EXPECT_NEAR(a.step1.objective, c.step1.objective, 1e-9);
  EXPECT_NEAR(a.step2.objective, c.step2.objective, 1e-9);
}

TEST(Calibrate, RejectsEmptyData) {
  EXPECT_THROW((void)calibrate_heston(CalibrationData{}), DataError);
  EXPECT_THROW((void)calibrate_msv(CalibrationData{}), DataError);
}

}  // namespace

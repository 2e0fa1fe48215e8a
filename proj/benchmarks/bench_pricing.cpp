#include <vector>

#include <benchmark/benchmark.h>

#include "msv/calibration.hpp"
#include "msv/implied_vol.hpp"
#include "msv/mc_oracle.hpp"
#include "msv/ncx2.hpp"
#include "msv/spx_pricer.hpp"
#include "msv/synthetic.hpp"
#include "msv/vix_pricer.hpp"

namespace {

const msv::ModelParams kParams{};
const msv::HiddenState kState{0.0234, 0.0194};

void BM_SpxCall(benchmark::State& state) {
  const double tau = static_cast<double>(state.range(0)) / 365.0;
  for (auto _ : state) {
    auto p = msv::price_spx_call({2000.0, 2050.0, tau, true}, kState, kParams);
    benchmark::DoNotOptimize(p.total);
  }
}
BENCHMARK(BM_SpxCall)->Arg(7)->Arg(30)->Arg(91)->Arg(365);

void BM_SpxStrikeBatch(benchmark::State& state) {
  std::vector<msv::SpxOptionSpec> specs;
  for (int k = 1800; k <= 2200; k += 25) specs.push_back({2000.0, double(k), 0.25, true});
  for (auto _ : state) benchmark::DoNotOptimize(msv::price_spx_batch(specs, kState, kParams));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(specs.size()));
}
BENCHMARK(BM_SpxStrikeBatch)->Unit(benchmark::kMillisecond);

void BM_VixCall(benchmark::State& state) {
  const double strike = static_cast<double>(state.range(0));
  for (auto _ : state) {
    auto p = msv::price_vix_call({strike, 30.0 / 365.0, true}, kState, kParams);
    benchmark::DoNotOptimize(p.total);
  }
}
BENCHMARK(BM_VixCall)->Arg(15)->Arg(20)->Arg(30);

void BM_Ncx2Pdf(benchmark::State& state) {
  const msv::Ncx2Params p{2.5, static_cast<double>(state.range(0)), 1.0};
  double zeta = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(msv::ncx2_pdf(zeta, p));
    zeta = zeta > 50.0 ? 0.1 : zeta + 0.37;
  }
}
BENCHMARK(BM_Ncx2Pdf)->Arg(1)->Arg(30)->Arg(300);

void BM_BsImpliedVol(benchmark::State& state) {
  const double price = msv::bs_call_price(2000.0, 2100.0, 0.25, 0.02, 0.18);
  for (auto _ : state) benchmark::DoNotOptimize(msv::bs_implied_vol(price, 2000.0, 2100.0, 0.25, 0.02));
}
BENCHMARK(BM_BsImpliedVol);

void BM_InnerStateFit(benchmark::State& state) {
  msv::SyntheticConfig sc;
  sc.dates = 1;
  sc.spx_expiry_days.clear();
  const auto data = msv::group_by_date(msv::generate_synthetic_quotes(sc));
  for (auto _ : state) benchmark::DoNotOptimize(msv::inner_state_fit(data.dates.front(), kParams));
}
BENCHMARK(BM_InnerStateFit)->Unit(benchmark::kMillisecond);

void BM_McSpx(benchmark::State& state) {
  const auto mp = msv::McModelParams::from_nu(kParams, 0.2166);
  msv::McConfig cfg;
  cfg.paths = static_cast<std::size_t>(state.range(0));
  const double strikes[] = {1900.0, 2000.0, 2100.0};
  for (auto _ : state)
    benchmark::DoNotOptimize(msv::mc_price_spx_strikes(mp, kState, 2000.0, 30.0 / 365.0, strikes, true, cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_McSpx)->Arg(20000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

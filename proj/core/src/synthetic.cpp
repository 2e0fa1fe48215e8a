#include "msv/synthetic.hpp"

#include <cmath>
#include <random>

#include "msv/errors.hpp"
#include "msv/vix_pricer.hpp"

namespace msv {

std::vector<OptionQuote> generate_synthetic_quotes(const SyntheticConfig& cfg) {
  if (cfg.states.empty() || cfg.dates <= 0) throw ConfigError("synthetic data needs dates and states");
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal;
  auto noisy = [&](double price) { return cfg.noise > 0.0 ? price * (1.0 + cfg.noise * normal(rng)) : price; };

  std::vector<OptionQuote> out;
  for (int i = 0; i < cfg.dates; ++i) {
    const Date date{std::chrono::sys_days{cfg.first_date} + std::chrono::days{i * cfg.date_spacing_days}};
    const HiddenState st = cfg.states[static_cast<std::size_t>(i) % cfg.states.size()];
    const double vix = cfg.multiscale ? vix_from_state(st, cfg.msv)
                                      : vix_from_z_heston(st.z, cfg.heston.kappa, cfg.heston.theta);
    auto emit = [&](Underlying u, OptionType type, double strike, int days, double level, double price) {
      const double p = noisy(price);
      if (!(p >= cfg.min_price)) return;
      OptionQuote q;
      q.trade_date = date;
      q.underlying = u;
      q.type = type;
      q.strike = strike;
      q.expiry = Date{std::chrono::sys_days{date} + std::chrono::days{days}};
      q.mid_price = p;
      q.volume = cfg.volume;
      q.underlying_level = level;
      out.push_back(q);
    };
    for (int days : cfg.vix_expiry_days) {
      for (double k : cfg.vix_strikes) {
        const VixOptionSpec spec{k, days / 365.0, true};
        const double price = cfg.multiscale ? price_vix(spec, st, cfg.msv).total
                                            : price_heston_vix(spec, st.z, cfg.heston);
        emit(Underlying::vix, OptionType::call, k, days, vix, price);
      }
    }
    for (int days : cfg.spx_expiry_days) {
      for (double m : cfg.spx_moneyness) {
        const double k = std::round(cfg.spx_spot * m);
        const bool call = k >= cfg.spx_spot;
        const SpxOptionSpec spec{cfg.spx_spot, k, days / 365.0, call};
        const double price = cfg.multiscale ? price_spx(spec, st, cfg.msv).total
                                            : price_heston(spec, st.z, cfg.heston);
        emit(Underlying::spx, call ? OptionType::call : OptionType::put, k, days, cfg.spx_spot, price);
      }
    }
  }
  return out;
}

}  // namespace msv

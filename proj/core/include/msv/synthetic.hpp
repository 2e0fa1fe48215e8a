#pragma once

#include <cstdint>
#include <vector>

#include "msv/model.hpp"
#include "msv/quotes.hpp"
#include "msv/spx_pricer.hpp"

namespace msv {

/// Recipe for a small quote set priced by one of the two models.
struct SyntheticConfig {
  bool multiscale = true;
  ModelParams msv{};
  HestonParams heston{};
  /// One state per date, cycled if there are fewer states than dates. For the
  /// Heston model only z (the variance) is used.
  std::vector<HiddenState> states{{0.0234, 0.0194}, {0.0110, 0.0203}, {0.0300, 0.0160}, {0.0150, 0.0250}};
  Date first_date{std::chrono::year{2017}, std::chrono::month{1}, std::chrono::day{3}};
  int dates = 4;
  int date_spacing_days = 7;
  double spx_spot = 2000.0;
  std::vector<int> spx_expiry_days{14, 45, 90};
  std::vector<double> spx_moneyness{0.9, 0.95, 1.0, 1.05, 1.1};
  std::vector<int> vix_expiry_days{7, 21, 49};
  std::vector<double> vix_strikes{15.0, 17.5, 20.0, 22.5, 25.0};
  double noise = 0.0;  ///< relative standard deviation of multiplicative price noise
  std::uint64_t seed = 1;
  double volume = 500.0;
  double min_price = 0.5;  ///< quotes cheaper than this are not emitted
};

/// SPX quotes are out-of-the-money puts below the spot and calls at or above
/// it; VIX quotes are calls. Deterministic given the config.
[[nodiscard]] std::vector<OptionQuote> generate_synthetic_quotes(const SyntheticConfig& cfg);

}  // namespace msv

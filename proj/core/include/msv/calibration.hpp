#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "msv/error_report.hpp"
#include "msv/model.hpp"
#include "msv/optimizer.hpp"
#include "msv/quotes.hpp"
#include "msv/spx_pricer.hpp"

namespace msv {

/// Sum over options of ((model - market) / (floor + market))^2.
/// Throws DataError on a length mismatch.
[[nodiscard]] double weighted_sse(std::span<const double> model_prices,
                                  std::span<const double> market_prices, double weight_floor = 0.1);

struct MarketOption {
  OptionQuote quote;
  double tau = 0.0;
};

/// Quotes of one trade date with its index closes.
struct CalibrationDate {
  Date date;
  double vix_level = 0.0;
  double spx_level = 0.0;
  std::vector<MarketOption> vix;
  std::vector<MarketOption> spx;
};

struct CalibrationData {
  std::vector<CalibrationDate> dates;
  std::vector<std::string> warnings;
};

/// Groups quotes by trade date. Dates without a VIX close are dropped with a
/// warning, since their hidden state cannot be pinned down.
[[nodiscard]] CalibrationData group_by_date(std::span<const OptionQuote> quotes);

struct CalibrationBounds {
  Bound kappa{0.0, 20.0, false, true};
  Bound theta{0.0, 1.0, false, true};
  Bound sigma{0.0, 3.0, false, true};
  Bound rho{-1.0, 0.0, true, true};
  Bound epsilon{1e-4, 0.1, false, true};
  Bound w3_eps{-0.5, 0.5, true, true};
};

struct InnerSearchSettings {
  double rel_tol = 1e-7;  ///< bracket width relative to the feasible y range
  int max_iterations = 100;
};

struct CalibrationConfig {
  NelderMeadSettings outer;
  InnerSearchSettings inner;
  CalibrationBounds bounds;
  double weight_floor = 0.1;
  double r = 0.02;
  QuadratureConfig quad{1.5, 200.0, 1e-7, 1e-7, 400000};
  /// Starting points of the outer searches.
  ModelParams initial_msv{2.0, 0.03, 0.5, -0.5, 0.02, 0.0, 0.02};
  HestonParams initial_heston{2.0, 0.05, 0.5, -0.5, 0.02};

  void validate() const;
};

struct StepReport {
  double objective = 0.0;
  int evaluations = 0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> trace;  ///< best objective per accepted simplex step
};

struct CalibrationResult {
  std::string model;  ///< "heston" or "msv"
  ModelParams params;        ///< msv fit (Heston fit: unused)
  HestonParams heston;       ///< Heston fit (msv fit: unused)
  std::vector<Date> dates;
  std::vector<HiddenState> states;  ///< Heston: z holds the variance, y = 0
  std::vector<bool> feasible;       ///< false for dates that were skipped
  std::size_t skipped_dates = 0;
  StepReport step1;
  StepReport step2;
  std::vector<std::string> log;
  ErrorReport report;  ///< in-sample
};

/// Fits y for one date: golden section over [0, y_max] with z from the VIX
/// constraint. Throws InfeasibleStateError if no y >= 0 gives z >= 0.
[[nodiscard]] HiddenState inner_state_fit(const CalibrationDate& date, const ModelParams& globals,
                                          const CalibrationConfig& cfg = {});

/// Weighted SSE of a date's VIX options at a given state.
[[nodiscard]] double date_vix_objective(const CalibrationDate& date, const HiddenState& state,
                                        const ModelParams& globals, const CalibrationConfig& cfg);

[[nodiscard]] CalibrationResult calibrate_heston(const CalibrationData& train, const CalibrationConfig& cfg = {});
[[nodiscard]] CalibrationResult calibrate_msv(const CalibrationData& train, const CalibrationConfig& cfg = {});

/// Model prices for every option of `data`, in date order, VIX options before
/// SPX options within a date, matching `flatten_quotes`. Dates the result does
/// not know get fresh states from the VIX constraint (and the inner fit for msv).
[[nodiscard]] std::vector<double> model_prices(const CalibrationResult& result, const CalibrationData& data,
                                               const CalibrationConfig& cfg = {});
[[nodiscard]] std::vector<OptionQuote> flatten_quotes(const CalibrationData& data);

/// Error report of `result` on `data` (in-sample or out-of-sample).
[[nodiscard]] ErrorReport evaluate(const CalibrationResult& result, const CalibrationData& data,
                                   const CalibrationConfig& cfg = {});

}  // namespace msv

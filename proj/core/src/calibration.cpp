#include "msv/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>

#include <fmt/format.h>

#include "msv/errors.hpp"
#include "msv/parallel.hpp"
#include "msv/vix_pricer.hpp"

namespace msv {
namespace {

constexpr double kNoFeasibleDate = 1e10;

struct DateFit {
  bool feasible = false;
  HiddenState state;
  double objective = 0.0;
};

double residual_sq(double model, double market, double floor) {
  const double e = (model - market) / (floor + market);
  return e * e;
}

VixOptionSpec vix_spec(const MarketOption& o) {
  return {o.quote.strike, o.tau, o.quote.type == OptionType::call};
}

SpxOptionSpec spx_spec(const CalibrationDate& d, const MarketOption& o) {
  return {d.spx_level, o.quote.strike, o.tau, o.quote.type == OptionType::call};
}

double heston_vix_objective(const CalibrationDate& d, double v0, const HestonParams& hp,
                            const CalibrationConfig& cfg) {
  double s = 0.0;
  for (const auto& o : d.vix)
    s += residual_sq(price_heston_vix(vix_spec(o), v0, hp, cfg.quad), o.quote.mid_price, cfg.weight_floor);
  return s;
}

double heston_spx_objective(const CalibrationDate& d, double v0, const HestonParams& hp,
                            const CalibrationConfig& cfg) {
  double s = 0.0;
  for (const auto& o : d.spx)
    s += residual_sq(price_heston(spx_spec(d, o), v0, hp, cfg.quad), o.quote.mid_price, cfg.weight_floor);
  return s;
}

double msv_spx_objective(const CalibrationDate& d, const HiddenState& st, const ModelParams& p,
                         const CalibrationConfig& cfg) {
  double s = 0.0;
  for (const auto& o : d.spx)
    s += residual_sq(price_spx(spx_spec(d, o), st, p, cfg.quad).total, o.quote.mid_price, cfg.weight_floor);
  return s;
}

// Feasible dates count with their objective; each infeasible one adds ten
// times the median feasible objective.
double aggregate(const std::vector<DateFit>& fits) {
  std::vector<double> ok;
  for (const auto& f : fits)
    if (f.feasible) ok.push_back(f.objective);
  if (ok.empty()) return kNoFeasibleDate;
  double total = 0.0;
  for (double v : ok) total += v;
  const std::size_t bad = fits.size() - ok.size();
  if (bad > 0) {
    std::sort(ok.begin(), ok.end());
    const std::size_t m = ok.size() / 2;
    const double median = ok.size() % 2 ? ok[m] : 0.5 * (ok[m - 1] + ok[m]);
    total += static_cast<double>(bad) * std::max(10.0 * median, 1e-8);
  }
  return total;
}

HestonParams heston_from(const std::vector<double>& x, double rho, double r) {
  return {x[0], x[1], x[2], rho, r};
}

void fill_step(StepReport& rep, const OptimizerResult& opt) {
  rep.objective = opt.value;
  rep.evaluations = opt.evaluations;
  rep.iterations = opt.iterations;
  rep.converged = opt.converged;
  rep.trace = opt.trace;
}

std::pair<HiddenState, double> fit_state(const CalibrationDate& d, const ModelParams& p,
                                         const CalibrationConfig& cfg) {
  if (d.vix.empty()) throw DataError("date " + format_date(d.date) + " has no VIX options");
  const double y_max = max_feasible_y(d.vix_level, p);
  if (!(y_max >= 0.0))
    throw InfeasibleStateError(fmt::format("VIX {} below the model floor on {}", d.vix_level, format_date(d.date)),
                               y_max);
  auto state_at = [&](double y) {
    y = std::clamp(y, 0.0, y_max);
    double z = 0.0;
    if (y < y_max) {
      try {
        z = z_from_vix_given_y(d.vix_level, y, p);
      } catch (const InfeasibleStateError&) {
        z = 0.0;  // rounding at the upper end of the bracket
      }
    }
    return HiddenState{y, z};
  };
  auto objective = [&](double y) { return date_vix_objective(d, state_at(y), p, cfg); };
  const auto m = golden_section(objective, 0.0, y_max, cfg.inner.rel_tol * std::max(y_max, 1e-12),
                                cfg.inner.max_iterations);
  return {state_at(m.x), m.value};
}

}  // namespace

double weighted_sse(std::span<const double> model_prices, std::span<const double> market_prices,
                    double weight_floor) {
  if (model_prices.size() != market_prices.size())
    throw DataError(fmt::format("weighted_sse: {} model prices vs {} market prices", model_prices.size(),
                                market_prices.size()));
  double s = 0.0;
  for (std::size_t i = 0; i < model_prices.size(); ++i)
    s += residual_sq(model_prices[i], market_prices[i], weight_floor);
  return s;
}

CalibrationData group_by_date(std::span<const OptionQuote> quotes) {
  std::map<int, CalibrationDate> by_day;
  for (const auto& q : quotes) {
    const int key = static_cast<int>(std::chrono::sys_days{q.trade_date}.time_since_epoch().count());
    auto& d = by_day[key];
    d.date = q.trade_date;
    MarketOption o{q, q.tau()};
    if (q.underlying == Underlying::vix) {
      d.vix_level = q.underlying_level;
      d.vix.push_back(o);
    } else {
      d.spx_level = q.underlying_level;
      d.spx.push_back(o);
    }
  }
  CalibrationData out;
  for (auto& [key, d] : by_day) {
    if (d.vix.empty()) {
      out.warnings.push_back("dropped " + format_date(d.date) + ": no VIX quotes, hence no VIX close");
      continue;
    }
    out.dates.push_back(std::move(d));
  }
  return out;
}

void CalibrationConfig::validate() const {
  for (const Bound* b : {&bounds.kappa, &bounds.theta, &bounds.sigma, &bounds.rho, &bounds.epsilon, &bounds.w3_eps})
    if (!(b->hi > b->lo)) throw ConfigError("calibration bound is empty");
  if (!(weight_floor > 0.0)) throw ConfigError("weight floor must be positive");
  if (outer.max_iterations <= 0 || outer.restarts < 0) throw ConfigError("invalid optimizer settings");
  if (!(inner.rel_tol > 0.0) || inner.max_iterations <= 0) throw ConfigError("invalid inner search settings");
  quad.validate();
}

double date_vix_objective(const CalibrationDate& date, const HiddenState& state, const ModelParams& globals,
                          const CalibrationConfig& cfg) {
  double s = 0.0;
  for (const auto& o : date.vix)
    s += residual_sq(price_vix(vix_spec(o), state, globals, cfg.quad).total, o.quote.mid_price,
                     cfg.weight_floor);
  return s;
}

HiddenState inner_state_fit(const CalibrationDate& date, const ModelParams& globals,
                            const CalibrationConfig& cfg) {
  return fit_state(date, globals, cfg).first;
}

CalibrationResult calibrate_heston(const CalibrationData& train, const CalibrationConfig& cfg) {
  cfg.validate();
  if (train.dates.empty()) throw DataError("no calibration dates");
  const auto& dates = train.dates;
  CalibrationResult res;
  res.model = "heston";

  // Step 1: (kappa, theta, sigma) on VIX options, v0 pinned by the VIX close.
  auto states_for = [&](const HestonParams& hp, std::vector<DateFit>& fits, bool with_objective) {
    parallel_for(dates.size(), [&](std::size_t i) {
      DateFit f;
      try {
        f.state = {0.0, z_from_vix_heston(dates[i].vix_level, hp.kappa, hp.theta)};
        if (with_objective) f.objective = heston_vix_objective(dates[i], f.state.z, hp, cfg);
        f.feasible = true;
      } catch (const Error&) {
        f.feasible = false;
      }
      fits[i] = f;
    });
  };
  const double rho0 = cfg.initial_heston.rho;
  auto step1 = [&](const std::vector<double>& x) {
    std::vector<DateFit> fits(dates.size());
    states_for(heston_from(x, rho0, cfg.r), fits, true);
    return aggregate(fits);
  };
  const auto& b = cfg.bounds;
  const auto opt1 = minimize_bounded(step1, {cfg.initial_heston.kappa, cfg.initial_heston.theta, cfg.initial_heston.sigma},
                                     {b.kappa, b.theta, b.sigma}, cfg.outer);
  fill_step(res.step1, opt1);
  HestonParams hp = heston_from(opt1.x, rho0, cfg.r);

  std::vector<DateFit> fits(dates.size());
  states_for(hp, fits, false);

  // Step 2: rho on SPX options with everything else frozen.
  auto step2 = [&](const std::vector<double>& x) {
    HestonParams h = hp;
    h.rho = x[0];
    std::vector<DateFit> f2(dates.size());
    parallel_for(dates.size(), [&](std::size_t i) {
      f2[i] = fits[i];
      if (!fits[i].feasible) return;
      try {
        f2[i].objective = heston_spx_objective(dates[i], fits[i].state.z, h, cfg);
      } catch (const Error&) {
        f2[i].feasible = false;
      }
    });
    return aggregate(f2);
  };
  const auto opt2 = minimize_bounded(step2, {rho0}, {b.rho}, cfg.outer);
  fill_step(res.step2, opt2);
  hp.rho = opt2.x[0];

  res.heston = hp;
  res.params = ModelParams{hp.kappa, hp.theta, hp.sigma, hp.rho, 0.0096, 0.0, hp.r};
  for (std::size_t i = 0; i < dates.size(); ++i) {
    res.dates.push_back(dates[i].date);
    res.states.push_back(fits[i].state);
    res.feasible.push_back(fits[i].feasible);
    if (!fits[i].feasible) {
      ++res.skipped_dates;
      res.log.push_back("skipped " + format_date(dates[i].date) + ": VIX close infeasible for the fitted theta");
    }
  }
  res.report = evaluate(res, train, cfg);
  return res;
}

CalibrationResult calibrate_msv(const CalibrationData& train, const CalibrationConfig& cfg) {
  cfg.validate();
  if (train.dates.empty()) throw DataError("no calibration dates");
  const auto& dates = train.dates;
  CalibrationResult res;
  res.model = "msv";

  ModelParams base = cfg.initial_msv;
  base.r = cfg.r;
  auto globals = [&](const std::vector<double>& x) {
    ModelParams p = base;
    p.kappa = x[0];
    p.theta = x[1];
    p.sigma = x[2];
    p.epsilon = x[3];
    return p;
  };
  auto fit_all = [&](const ModelParams& p) {
    std::vector<DateFit> fits(dates.size());
    parallel_for(dates.size(), [&](std::size_t i) {
      try {
        const auto [state, value] = fit_state(dates[i], p, cfg);
        fits[i] = {true, state, value};
      } catch (const Error&) {
        fits[i] = {};
      }
    });
    return fits;
  };

  // Step 1: (kappa, theta, sigma, epsilon) with nested per-date state fits.
  auto step1 = [&](const std::vector<double>& x) {
    const ModelParams p = globals(x);
    if (!(p.kappa * p.epsilon < 1.0)) return std::numeric_limits<double>::infinity();
    return aggregate(fit_all(p));
  };
  const auto& b = cfg.bounds;
  const auto opt1 = minimize_bounded(step1, {base.kappa, base.theta, base.sigma, base.epsilon},
                                     {b.kappa, b.theta, b.sigma, b.epsilon}, cfg.outer);
  fill_step(res.step1, opt1);
  ModelParams p = globals(opt1.x);
  const auto fits = fit_all(p);

  // Step 2: (rho, w3_eps) on SPX options, states and step-1 globals frozen.
  auto step2 = [&](const std::vector<double>& x) {
    ModelParams q = p;
    q.rho = x[0];
    q.w3_eps = x[1];
    std::vector<DateFit> f2(dates.size());
    parallel_for(dates.size(), [&](std::size_t i) {
      f2[i] = fits[i];
      if (!fits[i].feasible) return;
      try {
        f2[i].objective = msv_spx_objective(dates[i], fits[i].state, q, cfg);
      } catch (const Error&) {
        f2[i].feasible = false;
      }
    });
    return aggregate(f2);
  };
  const auto opt2 = minimize_bounded(step2, {base.rho, base.w3_eps}, {b.rho, b.w3_eps}, cfg.outer);
  fill_step(res.step2, opt2);
  p.rho = opt2.x[0];
  p.w3_eps = opt2.x[1];

  res.params = p;
  res.heston = HestonParams{p.kappa, p.theta, p.sigma, p.rho, p.r};
  for (std::size_t i = 0; i < dates.size(); ++i) {
    res.dates.push_back(dates[i].date);
    res.states.push_back(fits[i].state);
    res.feasible.push_back(fits[i].feasible);
    if (!fits[i].feasible) {
      ++res.skipped_dates;
      res.log.push_back("skipped " + format_date(dates[i].date) + ": no feasible hidden state");
    }
  }
  if (res.skipped_dates > 0)
    res.log.push_back(fmt::format("{} of {} dates skipped", res.skipped_dates, dates.size()));
  res.report = evaluate(res, train, cfg);
  return res;
}

std::vector<OptionQuote> flatten_quotes(const CalibrationData& data) {
  std::vector<OptionQuote> out;
  for (const auto& d : data.dates) {
    for (const auto& o : d.vix) out.push_back(o.quote);
    for (const auto& o : d.spx) out.push_back(o.quote);
  }
  return out;
}

std::vector<double> model_prices(const CalibrationResult& result, const CalibrationData& data,
                                 const CalibrationConfig& cfg) {
  const bool heston = result.model == "heston";
  std::vector<std::vector<double>> per_date(data.dates.size());
  parallel_for(data.dates.size(), [&](std::size_t i) {
    const auto& d = data.dates[i];
    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::optional<HiddenState> state;
    for (std::size_t j = 0; j < result.dates.size(); ++j)
      if (result.dates[j] == d.date && result.feasible[j]) state = result.states[j];
    try {
      if (!state) {
        state = heston ? HiddenState{0.0, z_from_vix_heston(d.vix_level, result.heston.kappa, result.heston.theta)}
                       : inner_state_fit(d, result.params, cfg);
      }
    } catch (const Error&) {
      per_date[i].assign(d.vix.size() + d.spx.size(), nan);
      return;
    }
    auto& out = per_date[i];
    for (const auto& o : d.vix)
      out.push_back(heston ? price_heston_vix(vix_spec(o), state->z, result.heston, cfg.quad)
                           : price_vix(vix_spec(o), *state, result.params, cfg.quad).total);
    for (const auto& o : d.spx)
      out.push_back(heston ? price_heston(spx_spec(d, o), state->z, result.heston, cfg.quad)
                           : price_spx(spx_spec(d, o), *state, result.params, cfg.quad).total);
  });
  std::vector<double> out;
  for (const auto& v : per_date) out.insert(out.end(), v.begin(), v.end());
  return out;
}

ErrorReport evaluate(const CalibrationResult& result, const CalibrationData& data, const CalibrationConfig& cfg) {
  const auto prices = model_prices(result, data, cfg);
  const auto quotes = flatten_quotes(data);
  std::vector<double> kept_prices;
  std::vector<OptionQuote> kept_quotes;
  for (std::size_t i = 0; i < prices.size(); ++i) {
    if (std::isnan(prices[i])) continue;
    kept_prices.push_back(prices[i]);
    kept_quotes.push_back(quotes[i]);
  }
  return error_report(kept_prices, kept_quotes);
}

}  // namespace msv

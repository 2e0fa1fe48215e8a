#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "msv/calibration.hpp"
#include "msv/config.hpp"
#include "msv/errors.hpp"
#include "msv/implied_vol.hpp"
#include "msv/mc_oracle.hpp"
#include "msv/parallel.hpp"
#include "msv/spx_pricer.hpp"
#include "msv/synthetic.hpp"
#include "msv/vix_pricer.hpp"
#include "result_json.hpp"

namespace {

using namespace msv;

std::string g(double v) { return fmt::format("{:.10g}", v); }

struct Common {
  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::size_t> threads;

  [[nodiscard]] AppConfig load() const {
    AppConfig cfg;
    if (!config_path.empty()) apply_key_values(cfg, load_key_values(config_path));
    for (const auto& kv : overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
      apply_key_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (threads) cfg.threads = *threads;
    try {
      cfg.model.validate();
      cfg.quad.validate();
    } catch (const Error& e) {
      throw ConfigError(e.what());
    }
    set_worker_count(cfg.threads);
    cfg.calib.r = cfg.model.r;
    return cfg;
  }
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config_path, "key = value config file")->check(CLI::ExistingFile);
  cmd->add_option("--set", c.overrides, "override one config key, e.g. --set model.kappa=3.5");
  cmd->add_option("--threads", c.threads, "worker threads (0 = all cores)");
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  return out;
}

QuoteSet read_quotes(const std::string& path, const AppConfig& cfg, bool filter, std::ostream& log) {
  QuoteSet qs = load_quotes(path, cfg.schema);
  log << fmt::format("loaded {} quotes, {} rejected rows\n", qs.quotes.size(), qs.rejects.size());
  for (const auto& r : qs.rejects) log << fmt::format("  line {}: {}\n", r.line, r.reason);
  if (filter) {
    auto f = apply_filters(qs.quotes, cfg.filter);
    log << fmt::format("filters: volume removed {}, price removed {}, expiry removed {}, kept {}\n",
                       f.stats.low_volume, f.stats.low_price, f.stats.near_expiry, f.stats.kept);
    qs.quotes = std::move(f.kept);
  }
  return qs;
}

// price-spx -----------------------------------------------------------------

struct PriceArgs {
  Common common;
  double spot = 2000.0;
  std::vector<double> strikes;
  std::vector<double> taus;
  double y = 0.0234;
  double z = 0.0194;
  bool put = false;
};

int run_price_spx(const PriceArgs& a) {
  const AppConfig cfg = a.common.load();
  std::vector<SpxOptionSpec> specs;
  for (double t : a.taus)
    for (double k : a.strikes) specs.push_back({a.spot, k, t, !a.put});
  const auto prices = price_spx_batch(specs, {a.y, a.z}, cfg.model, cfg.quad);
  std::cout << "strike,tau,type,leading,correction,total\n";
  for (std::size_t i = 0; i < specs.size(); ++i) {
    std::cout << fmt::format("{},{},{},{},{},{}\n", g(specs[i].strike), g(specs[i].tau), a.put ? "put" : "call",
                             g(prices[i].leading), g(prices[i].correction), g(prices[i].total));
    if (prices[i].asymptotics_invalid) std::cerr << "warning: maturity below one day, expansion unreliable\n";
  }
  return 0;
}

int run_price_vix(const PriceArgs& a) {
  const AppConfig cfg = a.common.load();
  std::vector<VixOptionSpec> specs;
  for (double t : a.taus)
    for (double k : a.strikes) specs.push_back({k, t, !a.put});
  const HiddenState st{a.y, a.z};
  const auto prices = price_vix_batch(specs, st, cfg.model, cfg.quad);
  std::cerr << fmt::format("model VIX {}\n", g(vix_from_state(st, cfg.model)));
  std::cout << "strike,tau,type,leading,correction,total\n";
  for (std::size_t i = 0; i < specs.size(); ++i)
    std::cout << fmt::format("{},{},{},{},{},{}\n", g(specs[i].strike), g(specs[i].tau), a.put ? "put" : "call",
                             g(prices[i].leading), g(prices[i].correction), g(prices[i].total));
  return 0;
}

// calibrate -------------------------------------------------------------------

struct CalibrateArgs {
  Common common;
  std::string model;
  std::string quotes;
  std::string out;
  std::string errors_csv;
  std::string split_date;
  bool no_filter = false;
};

int run_calibrate(const CalibrateArgs& a) {
  const AppConfig cfg = a.common.load();
  QuoteSet qs = read_quotes(a.quotes, cfg, !a.no_filter, std::cerr);
  std::vector<OptionQuote> train = qs.quotes;
  std::vector<OptionQuote> test;
  if (!a.split_date.empty()) {
    auto split = split_train_test(qs.quotes, parse_date(a.split_date));
    for (const auto& w : split.warnings) std::cerr << "warning: " << w << '\n';
    std::cerr << fmt::format("train {} quotes, test {} quotes\n", split.train.size(), split.test.size());
    train = std::move(split.train);
    test = std::move(split.test);
  }
  const CalibrationData data = group_by_date(train);
  for (const auto& w : data.warnings) std::cerr << "warning: " << w << '\n';
  const CalibrationResult res = a.model == "heston" ? calibrate_heston(data, cfg.calib) : calibrate_msv(data, cfg.calib);
  for (const auto& l : res.log) std::cerr << l << '\n';

  auto j = cli::to_json(res);
  if (!test.empty()) j["out_of_sample_report"] = cli::to_json(evaluate(res, group_by_date(test), cfg.calib));
  if (a.out.empty()) {
    std::cout << j.dump(2) << '\n';
  } else {
    auto out = open_out(a.out);
    out << j.dump(2) << '\n';
    std::cerr << "wrote " << a.out << '\n';
  }
  if (!a.errors_csv.empty()) {
    auto out = open_out(a.errors_csv);
    write_error_table_csv(out, res.report);
  }
  return 0;
}

// imvol-surface -------------------------------------------------------------

struct SurfaceArgs {
  Common common;
  std::string underlying = "vix";
  std::string kind = "difference";
  double spot = 2000.0;
  double y = 0.0234;
  double z = 0.0194;
  double z_uncorrected = 0.0197;
  std::vector<double> strikes;
  std::vector<double> maturities;
  std::string out;
};

int run_surface(const SurfaceArgs& a) {
  const AppConfig cfg = a.common.load();
  SurfaceRequest req;
  req.vix = a.underlying == "vix";
  req.kind = a.kind == "corrected" ? SurfaceKind::corrected
             : a.kind == "uncorrected" ? SurfaceKind::uncorrected
                                       : SurfaceKind::difference;
  req.spot = a.spot;
  req.state = {a.y, a.z};
  req.z_uncorrected = a.z_uncorrected;
  req.strikes = a.strikes;
  req.maturities = a.maturities;
  const SurfaceGrid grid = implied_vol_surface(req, cfg.model, cfg.quad);
  if (a.out.empty()) {
    write_surface_csv(std::cout, grid);
  } else {
    auto out = open_out(a.out);
    write_surface_csv(out, grid);
  }
  return 0;
}

// validate --------------------------------------------------------------------

struct ValidateArgs {
  Common common;
  double spot = 2000.0;
  double y = 0.0234;
  double z = 0.0194;
  std::vector<double> spx_strikes{1800, 1900, 2000, 2100, 2200};
  std::vector<double> vix_strikes{15, 20, 25};
  std::vector<double> taus{30.0 / 365.0, 0.25};
};

int run_validate(const ValidateArgs& a) {
  const AppConfig cfg = a.common.load();
  const auto mp = McModelParams::from_nu(cfg.model, cfg.mc_nu);
  const HiddenState st{a.y, a.z};
  std::cout << fmt::format("# nu={} eta={} paths={} seed={}\n", g(mp.nu), g(mp.eta), cfg.mc.paths, cfg.mc.seed);
  std::cout << "underlying,strike,tau,analytic,mc,mc_se,z_score\n";
  for (double t : a.taus) {
    const auto mc = mc_price_spx_strikes(mp, st, a.spot, t, a.spx_strikes, true, cfg.mc);
    for (std::size_t i = 0; i < a.spx_strikes.size(); ++i) {
      const double an = price_spx_call({a.spot, a.spx_strikes[i], t, true}, st, cfg.model, cfg.quad).total;
      std::cout << fmt::format("SPX,{},{},{},{},{},{}\n", g(a.spx_strikes[i]), g(t), g(an), g(mc[i].mean),
                               g(mc[i].standard_error), g((an - mc[i].mean) / mc[i].standard_error));
    }
    const auto mv = mc_price_vix_strikes(mp, st, t, a.vix_strikes, true, cfg.mc);
    for (std::size_t i = 0; i < a.vix_strikes.size(); ++i) {
      const double an = price_vix_call({a.vix_strikes[i], t, true}, st, cfg.model, cfg.quad).total;
      std::cout << fmt::format("VIX,{},{},{},{},{},{}\n", g(a.vix_strikes[i]), g(t), g(an), g(mv[i].mean),
                               g(mv[i].standard_error), g((an - mv[i].mean) / mv[i].standard_error));
    }
  }
  return 0;
}

// error-report ----------------------------------------------------------------

struct ReportArgs {
  Common common;
  std::string quotes;
  std::string result;
  std::string compare;
  std::string out;
  bool no_filter = false;
};

CalibrationResult read_result(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open result file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("result file '" + path + "' is not JSON: " + e.what());
  }
  return cli::result_from_json(j);
}

int run_report(const ReportArgs& a) {
  const AppConfig cfg = a.common.load();
  const QuoteSet qs = read_quotes(a.quotes, cfg, !a.no_filter, std::cerr);
  const CalibrationData data = group_by_date(qs.quotes);
  const ErrorReport ours = evaluate(read_result(a.result), data, cfg.calib);
  std::optional<ErrorReport> heston;
  if (!a.compare.empty()) heston = evaluate(read_result(a.compare), data, cfg.calib);
  write_error_table_text(std::cerr, ours, heston);
  if (a.out.empty()) {
    write_error_table_csv(std::cout, ours, heston);
  } else {
    auto out = open_out(a.out);
    write_error_table_csv(out, ours, heston);
  }
  return 0;
}

// synthetic -------------------------------------------------------------------

struct SyntheticArgs {
  Common common;
  std::string model = "msv";
  double noise = 0.0;
  std::uint64_t seed = 1;
  int dates = 4;
  std::string out;
};

int run_synthetic(const SyntheticArgs& a) {
  const AppConfig cfg = a.common.load();
  SyntheticConfig sc;
  sc.multiscale = a.model == "msv";
  sc.msv = cfg.model;
  sc.heston = HestonParams{};
  sc.heston.r = cfg.model.r;
  if (!sc.multiscale) sc.states = {{0.0, 0.04}, {0.0, 0.03}, {0.0, 0.05}, {0.0, 0.035}};
  sc.noise = a.noise;
  sc.seed = a.seed;
  sc.dates = a.dates;
  const auto quotes = generate_synthetic_quotes(sc);
  if (a.out.empty()) {
    write_quotes(std::cout, quotes);
  } else {
    auto out = open_out(a.out);
    write_quotes(out, quotes);
    std::cerr << fmt::format("wrote {} quotes to {}\n", quotes.size(), a.out);
  }
  return 0;
}

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::usage: return 1;
    case ErrorKind::data: return 2;
    case ErrorKind::numerical: return 3;
  }
  return 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-factor multiscale stochastic volatility: SPX/VIX pricing, calibration, validation"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  PriceArgs spx;
  auto* c_spx = app.add_subcommand("price-spx", "price SPX options (leading, correction, total)");
  add_common(c_spx, spx.common);
  c_spx->add_option("--spot", spx.spot, "index level")->check(CLI::PositiveNumber);
  c_spx->add_option("--strike,--strikes", spx.strikes, "one or more strikes")->required()->delimiter(',')->check(CLI::PositiveNumber);
  c_spx->add_option("--tau", spx.taus, "one or more maturities in years")->required()->delimiter(',')->check(CLI::PositiveNumber);
  c_spx->add_option("--y", spx.y, "fast variance factor");
  c_spx->add_option("--z", spx.z, "slow variance factor");
  c_spx->add_flag("--put", spx.put, "price puts instead of calls");

  PriceArgs vix;
  auto* c_vix = app.add_subcommand("price-vix", "price VIX options (leading, correction, total)");
  add_common(c_vix, vix.common);
  c_vix->add_option("--strike,--strikes", vix.strikes, "one or more strikes (VIX points)")->required()->delimiter(',')->check(CLI::NonNegativeNumber);
  c_vix->add_option("--tau", vix.taus, "one or more maturities in years")->required()->delimiter(',')->check(CLI::PositiveNumber);
  c_vix->add_option("--y", vix.y, "fast variance factor");
  c_vix->add_option("--z", vix.z, "slow variance factor");
  c_vix->add_flag("--put", vix.put, "price puts instead of calls");

  CalibrateArgs cal;
  auto* c_cal = app.add_subcommand("calibrate", "two-step calibration to SPX and VIX quotes");
  add_common(c_cal, cal.common);
  c_cal->add_option("model", cal.model, "heston or msv")->required()->check(CLI::IsMember({"heston", "msv"}));
  c_cal->add_option("--quotes", cal.quotes, "quote CSV")->required();
  c_cal->add_option("--out", cal.out, "result JSON (default: stdout)");
  c_cal->add_option("--errors", cal.errors_csv, "in-sample error table CSV");
  c_cal->add_option("--split-date", cal.split_date, "fit on trades before this date, report after it");
  c_cal->add_flag("--no-filter", cal.no_filter, "skip the volume/price/expiry filters");

  SurfaceArgs surf;
  auto* c_surf = app.add_subcommand("imvol-surface", "implied-vol grid of corrected, uncorrected or difference");
  add_common(c_surf, surf.common);
  c_surf->add_option("--underlying", surf.underlying)->check(CLI::IsMember({"spx", "vix"}));
  c_surf->add_option("--kind", surf.kind)->check(CLI::IsMember({"corrected", "uncorrected", "difference"}));
  c_surf->add_option("--spot", surf.spot, "SPX level")->check(CLI::PositiveNumber);
  c_surf->add_option("--y", surf.y, "fast variance factor of the corrected prices");
  c_surf->add_option("--z", surf.z, "slow variance factor of the corrected prices");
  c_surf->add_option("--z-uncorrected", surf.z_uncorrected, "slow variance of the uncorrected prices");
  c_surf->add_option("--strikes", surf.strikes)->required()->delimiter(',');
  c_surf->add_option("--maturities", surf.maturities)->required()->delimiter(',');
  c_surf->add_option("--out", surf.out, "CSV path (default: stdout)");

  ValidateArgs val;
  auto* c_val = app.add_subcommand("validate", "Monte Carlo vs analytic prices");
  add_common(c_val, val.common);
  c_val->add_option("--spot", val.spot)->check(CLI::PositiveNumber);
  c_val->add_option("--y", val.y);
  c_val->add_option("--z", val.z);
  c_val->add_option("--spx-strikes", val.spx_strikes)->delimiter(',');
  c_val->add_option("--vix-strikes", val.vix_strikes)->delimiter(',');
  c_val->add_option("--tau", val.taus)->delimiter(',');

  ReportArgs rep;
  auto* c_rep = app.add_subcommand("error-report", "maturity-bucketed error table for a calibration result");
  add_common(c_rep, rep.common);
  c_rep->add_option("--quotes", rep.quotes, "quote CSV")->required();
  c_rep->add_option("--result", rep.result, "calibration result JSON (\"ours\")")->required();
  c_rep->add_option("--compare", rep.compare, "Heston result JSON for the o/h columns");
  c_rep->add_option("--out", rep.out, "CSV path (default: stdout)");
  c_rep->add_flag("--no-filter", rep.no_filter);

  SyntheticArgs syn;
  auto* c_syn = app.add_subcommand("synthetic", "write a synthetic quote CSV priced by a known model");
  add_common(c_syn, syn.common);
  c_syn->add_option("--model", syn.model)->check(CLI::IsMember({"heston", "msv"}));
  c_syn->add_option("--noise", syn.noise, "relative price noise")->check(CLI::NonNegativeNumber);
  c_syn->add_option("--seed", syn.seed);
  c_syn->add_option("--dates", syn.dates)->check(CLI::PositiveNumber);
  c_syn->add_option("--out", syn.out, "CSV path (default: stdout)");

  auto* c_ref = app.add_subcommand("config-reference", "print every config key with its default");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (c_spx->parsed()) return run_price_spx(spx);
    if (c_vix->parsed()) return run_price_vix(vix);
    if (c_cal->parsed()) return run_calibrate(cal);
    if (c_surf->parsed()) return run_surface(surf);
    if (c_val->parsed()) return run_validate(val);
    if (c_rep->parsed()) return run_report(rep);
    if (c_syn->parsed()) return run_synthetic(syn);
    if (c_ref->parsed()) {
      write_config_reference(std::cout);
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 1;
}

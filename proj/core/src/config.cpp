#include "msv/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <istream>
#include <ostream>
#include <vector>

#include <fmt/format.h>

#include "msv/errors.hpp"

namespace msv {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) throw ConfigError("'" + key + "' expects a number, got '" + v + "'");
  return out;
}

long long to_int(const std::string& key, const std::string& v) {
  long long out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) throw ConfigError("'" + key + "' expects an integer, got '" + v + "'");
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("'" + key + "' expects true/false, got '" + v + "'");
}

Bound to_bound(const std::string& key, const std::string& v, Bound b) {
  const auto comma = v.find(',');
  if (comma == std::string::npos) throw ConfigError("'" + key + "' expects 'lo,hi'");
  b.lo = to_double(key, trim(v.substr(0, comma)));
  b.hi = to_double(key, trim(v.substr(comma + 1)));
  return b;
}

struct Entry {
  std::string key;
  std::string help;
  std::function<void(AppConfig&, const std::string&)> set;
  std::function<std::string(const AppConfig&)> get;
};

std::string num(double v) { return fmt::format("{:.10g}", v); }

#define MSV_DOUBLE(KEY, FIELD, HELP)                                                      \
  Entry { KEY, HELP, [](AppConfig& c, const std::string& v) { c.FIELD = to_double(KEY, v); }, \
          [](const AppConfig& c) { return num(c.FIELD); } }
#define MSV_INT(KEY, FIELD, TYPE, HELP)                                                                       \
  Entry { KEY, HELP, [](AppConfig& c, const std::string& v) { c.FIELD = static_cast<TYPE>(to_int(KEY, v)); }, \
          [](const AppConfig& c) { return std::to_string(c.FIELD); } }
#define MSV_STRING(KEY, FIELD, HELP)                                   \
  Entry { KEY, HELP, [](AppConfig& c, const std::string& v) { c.FIELD = v; }, \
          [](const AppConfig& c) { return c.FIELD; } }
#define MSV_BOUND(KEY, FIELD, HELP)                                                               \
  Entry { KEY, HELP, [](AppConfig& c, const std::string& v) { c.FIELD = to_bound(KEY, v, c.FIELD); }, \
          [](const AppConfig& c) { return num(c.FIELD.lo) + "," + num(c.FIELD.hi); } }

const std::vector<Entry>& entries() {
  static const std::vector<Entry> table{
      MSV_DOUBLE("model.kappa", model.kappa, "mean-reversion rate of the slow factor"),
      MSV_DOUBLE("model.theta", model.theta, "long-run level of the slow factor"),
      MSV_DOUBLE("model.sigma", model.sigma, "vol of vol of the slow factor"),
      MSV_DOUBLE("model.rho", model.rho, "asset / slow-factor correlation"),
      MSV_DOUBLE("model.epsilon", model.epsilon, "fast time scale (years)"),
      MSV_DOUBLE("model.w3_eps", model.w3_eps, "first-order correction coefficient"),
      MSV_DOUBLE("model.r", model.r, "risk-free rate used for pricing"),
      MSV_DOUBLE("quad.contour_shift", quad.contour_shift, "Im(k) of the Fourier contour, > 1"),
      MSV_DOUBLE("quad.truncation", quad.truncation, "initial half-width of the Re(k) range"),
      MSV_DOUBLE("quad.abs_tol", quad.abs_tol, "absolute quadrature tolerance (SPX: per unit strike)"),
      MSV_DOUBLE("quad.rel_tol", quad.rel_tol, "relative quadrature tolerance"),
      MSV_INT("quad.max_nodes", quad.max_nodes, std::size_t, "quadrature node budget"),
      MSV_DOUBLE("calib.f_tol", calib.outer.f_tol, "simplex value spread at convergence"),
      MSV_DOUBLE("calib.x_tol", calib.outer.x_tol, "simplex diameter at convergence (transformed)"),
      MSV_INT("calib.max_iterations", calib.outer.max_iterations, int, "simplex iterations per run"),
      MSV_INT("calib.restarts", calib.outer.restarts, int, "random restarts of the simplex"),
      MSV_INT("calib.seed", calib.outer.seed, std::uint64_t, "seed of the restart offsets"),
      MSV_DOUBLE("calib.initial_step", calib.outer.initial_step, "initial simplex edge (transformed)"),
      MSV_DOUBLE("calib.snap_distance", calib.outer.snap_distance, "distance at which closed bounds are snapped to"),
      MSV_DOUBLE("calib.inner_rel_tol", calib.inner.rel_tol, "golden-section bracket width / feasible y range"),
      MSV_INT("calib.inner_max_iterations", calib.inner.max_iterations, int, "golden-section iterations"),
      MSV_DOUBLE("calib.weight_floor", calib.weight_floor, "floor in the residual weight 1/(floor + price)"),
      MSV_DOUBLE("calib.r", calib.r, "risk-free rate used during calibration"),
      MSV_DOUBLE("calib.quad_abs_tol", calib.quad.abs_tol, "quadrature abs_tol inside calibration"),
      MSV_DOUBLE("calib.quad_rel_tol", calib.quad.rel_tol, "quadrature rel_tol inside calibration"),
      MSV_BOUND("calib.bound.kappa", calib.bounds.kappa, "kappa interval"),
      MSV_BOUND("calib.bound.theta", calib.bounds.theta, "theta interval"),
      MSV_BOUND("calib.bound.sigma", calib.bounds.sigma, "sigma interval"),
      MSV_BOUND("calib.bound.rho", calib.bounds.rho, "rho interval (closed)"),
      MSV_BOUND("calib.bound.epsilon", calib.bounds.epsilon, "epsilon interval"),
      MSV_BOUND("calib.bound.w3_eps", calib.bounds.w3_eps, "w3_eps interval (closed)"),
      MSV_DOUBLE("calib.init.kappa", calib.initial_msv.kappa, "starting kappa (multiscale)"),
      MSV_DOUBLE("calib.init.theta", calib.initial_msv.theta, "starting theta (multiscale)"),
      MSV_DOUBLE("calib.init.sigma", calib.initial_msv.sigma, "starting sigma (multiscale)"),
      MSV_DOUBLE("calib.init.rho", calib.initial_msv.rho, "starting rho (multiscale)"),
      MSV_DOUBLE("calib.init.epsilon", calib.initial_msv.epsilon, "starting epsilon"),
      MSV_DOUBLE("calib.init.w3_eps", calib.initial_msv.w3_eps, "starting w3_eps"),
      MSV_DOUBLE("calib.init_heston.kappa", calib.initial_heston.kappa, "starting kappa (Heston)"),
      MSV_DOUBLE("calib.init_heston.theta", calib.initial_heston.theta, "starting theta (Heston)"),
      MSV_DOUBLE("calib.init_heston.sigma", calib.initial_heston.sigma, "starting sigma (Heston)"),
      MSV_DOUBLE("calib.init_heston.rho", calib.initial_heston.rho, "starting rho (Heston)"),
      MSV_INT("mc.paths", mc.paths, std::size_t, "Monte Carlo paths"),
      MSV_DOUBLE("mc.dt", mc.dt, "time step; 0 picks min(eps/20, 1/2000)"),
      MSV_INT("mc.seed", mc.seed, std::uint64_t, "Monte Carlo seed"),
      Entry{"mc.antithetic", "antithetic pairs", [](AppConfig& c, const std::string& v) { c.mc.antithetic = to_bool("mc.antithetic", v); },
            [](const AppConfig& c) { return std::string(c.mc.antithetic ? "true" : "false"); }},
      MSV_STRING("mc.scheme", mc.scheme, "discretisation scheme tag"),
      MSV_DOUBLE("mc.nu", mc_nu, "fast-factor vol of vol; eta follows from w3_eps"),
      MSV_DOUBLE("filter.min_volume", filter.min_volume, "minimum daily volume"),
      MSV_DOUBLE("filter.min_price", filter.min_price, "minimum price"),
      MSV_INT("filter.min_days_to_expiry", filter.min_days_to_expiry, int, "minimum calendar days to expiry"),
      MSV_STRING("schema.date", schema.date, "CSV column of the trade date"),
      MSV_STRING("schema.underlying", schema.underlying, "CSV column of SPX/VIX"),
      MSV_STRING("schema.type", schema.type, "CSV column of call/put"),
      MSV_STRING("schema.strike", schema.strike, "CSV column of the strike"),
      MSV_STRING("schema.expiry", schema.expiry, "CSV column of the expiry date"),
      MSV_STRING("schema.price", schema.price, "CSV column of the mid price"),
      MSV_STRING("schema.volume", schema.volume, "CSV column of the volume"),
      MSV_STRING("schema.underlying_close", schema.underlying_close, "CSV column of the index close"),
      MSV_INT("threads", threads, std::size_t, "worker threads, 0 = all cores"),
  };
  return table;
}

#undef MSV_DOUBLE
#undef MSV_INT
#undef MSV_STRING
#undef MSV_BOUND

}  // namespace

std::map<std::string, std::string> parse_key_values(std::istream& in) {
  std::map<std::string, std::string> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(fmt::format("config line {}: expected 'key = value'", line_no));
    out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

std::map<std::string, std::string> load_key_values(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_key_values(in);
}

void apply_key_value(AppConfig& cfg, const std::string& key, const std::string& value) {
  for (const auto& e : entries()) {
    if (e.key == key) {
      e.set(cfg, value);
      return;
    }
  }
  throw ConfigError("unknown config key '" + key + "'");
}

void apply_key_values(AppConfig& cfg, const std::map<std::string, std::string>& values) {
  for (const auto& [k, v] : values) apply_key_value(cfg, k, v);
}

void write_config_reference(std::ostream& os, const AppConfig& cfg) {
  for (const auto& e : entries()) os << fmt::format("{} = {}  # {}\n", e.key, e.get(cfg), e.help);
}

}  // namespace msv

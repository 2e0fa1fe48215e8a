#include "msv/implied_vol.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <numbers>
#include <ostream>
#include <string>
#include <utility>

#include "msv/errors.hpp"
#include "msv/spx_pricer.hpp"
#include "msv/vix_pricer.hpp"

namespace msv {
namespace {

double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }
double norm_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

// Newton on f(sigma) = price(sigma) - target with a maintained bracket
// [lo, hi]; steps leaving the bracket are replaced by bisection. Once the
// residual is within tolerance Newton keeps polishing until the step stalls,
// which matters where vega is small.
template <class Price, class Slope>
ImpliedVolPoint solve(double target, double lo, double hi, double guess, Price&& price,
                      Slope&& slope) {
  ImpliedVolPoint out;
  const double tol = 1e-10 * (1.0 + target);
  double s = std::clamp(guess, lo, hi);
  for (int it = 1; it <= kImpliedVolBudget; ++it) {
    const double f = price(s) - target;
    out.iterations = it;
    const bool within = std::abs(f) < tol;
    if (f == 0.0) break;
    if (f > 0.0) hi = s; else lo = s;
    const double v = slope(s);
    double next = v > 0.0 ? s - f / v : 0.5 * (lo + hi);
    const bool newton = next > lo && next < hi;
    if (within && (!newton || std::abs(next - s) <= 1e-14 * s)) break;
    if (!newton) next = 0.5 * (lo + hi);
    s = next;
    if (hi - lo < 1e-15 * hi) break;
  }
  out.implied_vol = s;
  out.converged = std::abs(price(s) - target) < tol;
  return out;
}

}  // namespace

double vix_normal_price(double vix_level, double strike, double tau, double sigma_n) {
  if (!(tau > 0.0)) throw DomainError("tau must be positive");
  if (!(sigma_n >= 0.0)) throw DomainError("normal vol must be non-negative");
  const double sd = sigma_n * std::sqrt(tau);
  const double m = vix_level - strike;
  if (sd == 0.0) return std::max(m, 0.0);
  return m * norm_cdf(m / sd) + sd * norm_pdf(m / sd);
}

ImpliedVolPoint vix_normal_implied_vol(double price, double vix_level, double strike, double tau) {
  if (!(tau > 0.0)) throw DomainError("tau must be positive");
  const double intrinsic = std::max(vix_level - strike, 0.0);
  if (!std::isfinite(price) || !(price > intrinsic))
    throw NoRootError(fmt::format("VIX price {} not above intrinsic {}", price, intrinsic));
  const double sqrt_t = std::sqrt(tau);
  // Price grows without bound in sigma (like sd / sqrt(2 pi)), so doubling finds a bracket.
  double hi = std::max(1.0, 2.0 * price * std::sqrt(2.0 * std::numbers::pi) / sqrt_t);
  int doublings = 0;
  while (vix_normal_price(vix_level, strike, tau, hi) < price) {
    hi *= 2.0;
    if (++doublings > 60) throw NoRootError("no bracket for the normal implied vol");
  }
  const double guess = (price - 0.5 * intrinsic) * std::sqrt(2.0 * std::numbers::pi) / sqrt_t;
  auto p = [&](double s) { return vix_normal_price(vix_level, strike, tau, s); };
  auto vega = [&](double s) { return sqrt_t * norm_pdf((vix_level - strike) / (s * sqrt_t)); };
  auto out = solve(price, 0.0, hi, guess, p, vega);
  out.strike = strike;
  out.maturity = tau;
  return out;
}

double bs_call_price(double x, double strike, double tau, double r, double sigma) {
  const double df = std::exp(-r * tau);
  if (sigma <= 0.0) return std::max(x - strike * df, 0.0);
  const double sd = sigma * std::sqrt(tau);
  const double d1 = (std::log(x / strike) + r * tau) / sd + 0.5 * sd;
  return x * norm_cdf(d1) - strike * df * norm_cdf(d1 - sd);
}

double bs_vega(double x, double strike, double tau, double r, double sigma) {
  const double sd = sigma * std::sqrt(tau);
  if (sd <= 0.0) return 0.0;
  const double d1 = (std::log(x / strike) + r * tau) / sd + 0.5 * sd;
  return x * std::sqrt(tau) * norm_pdf(d1);
}

ImpliedVolPoint bs_implied_vol(double price, double x, double strike, double tau, double r) {
  if (!(tau > 0.0) || !(x > 0.0) || !(strike > 0.0)) throw DomainError("invalid Black-Scholes inputs");
  const double lower = std::max(x - strike * std::exp(-r * tau), 0.0);
  if (!std::isfinite(price) || !(price > lower) || !(price < x))
    throw NoRootError(fmt::format("call price {} outside the no-arbitrage band ({}, {})", price, lower, x));
  double hi = 1.0;
  int doublings = 0;
  while (bs_call_price(x, strike, tau, r, hi) < price) {
    hi *= 2.0;
    if (++doublings > 60) throw NoRootError("no bracket for the Black-Scholes implied vol");
  }
  // Brenner-Subrahmanyam style start, sigma ~ sqrt(2 pi / tau) price / x.
  const double guess = std::sqrt(2.0 * std::numbers::pi / tau) * (price - 0.5 * lower) / x;
  auto p = [&](double s) { return bs_call_price(x, strike, tau, r, s); };
  auto vega = [&](double s) { return bs_vega(x, strike, tau, r, s); };
  auto out = solve(price, 0.0, hi, guess, p, vega);
  out.strike = strike;
  out.maturity = tau;
  return out;
}

void write_surface_csv(std::ostream& os, const SurfaceGrid& grid) {
  if (grid.values.size() != grid.strikes.size())
    throw DataError("surface grid has a row count different from its strike count");
  os << "strike";
  for (double t : grid.maturities) os << fmt::format(",{:.10g}", t);
  os << '\n';
  for (std::size_t i = 0; i < grid.strikes.size(); ++i) {
    if (grid.values[i].size() != grid.maturities.size())
      throw DataError("surface grid row has the wrong number of maturities");
    os << fmt::format("{:.10g}", grid.strikes[i]);
    for (double v : grid.values[i]) os << fmt::format(",{:.10g}", v);
    os << '\n';
  }
}

namespace {

double implied_or_nan(bool vix, double price, double level, double k, double t, double r) {
  try {
    const auto p = vix ? vix_normal_implied_vol(price, level, k, t) : bs_implied_vol(price, level, k, t, r);
    return p.converged ? p.implied_vol : std::nan("");
  } catch (const NoRootError&) {
    return std::nan("");
  }
}

}  // namespace

SurfaceGrid implied_vol_surface(const SurfaceRequest& request, const ModelParams& params,
                                const QuadratureConfig& quad) {
  const HiddenState flat{request.z_uncorrected, request.z_uncorrected};
  SurfaceGrid grid{request.strikes, request.maturities, {}};
  for (double k : request.strikes) {
    std::vector<double> row;
    for (double t : request.maturities) {
      double s01 = 0.0;
      double s0 = 0.0;
      if (request.vix) {
        // The normal model prices undiscounted payoffs.
        const double grow = std::exp(params.r * t);
        const auto pc = price_vix_call({k, t, true}, request.state, params, quad);
        const auto pu = price_vix_call({k, t, true}, flat, params, quad);
        s01 = implied_or_nan(true, grow * pc.total, vix_from_state(request.state, params), k, t, params.r);
        s0 = implied_or_nan(true, grow * pu.leading, vix_limit_from_z(request.z_uncorrected, params), k, t,
                            params.r);
      } else {
        const auto pc = price_spx_call({request.spot, k, t, true}, request.state, params, quad);
        const auto pu = price_spx_call({request.spot, k, t, true}, flat, params, quad);
        s01 = implied_or_nan(false, pc.total, request.spot, k, t, params.r);
        s0 = implied_or_nan(false, pu.leading, request.spot, k, t, params.r);
      }
      switch (request.kind) {
        case SurfaceKind::corrected: row.push_back(s01); break;
        case SurfaceKind::uncorrected: row.push_back(s0); break;
        case SurfaceKind::difference: row.push_back(s01 - s0); break;
      }
    }
    grid.values.push_back(std::move(row));
  }
  return grid;
}

}  // namespace msv

#include "msv/spx_pricer.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "msv/errors.hpp"
#include "msv/parallel.hpp"
#include "msv/quadrature.hpp"

namespace msv {

namespace {

constexpr cplx I{0.0, 1.0};
constexpr double kMaxExponent = 700.0;
constexpr double kOneDay = 1.0 / 365.0;
constexpr double kMaxTruncation = 1e6;

struct Kernel {
  EffectiveHeston dyn;
  double w3_eps;
};

// Terms of the transform at (tau, k). Only the reciprocal ratio
// g2 = 1/g = (b - d)/(b + d) and E = exp(-tau d) appear, both bounded on the
// principal branch.
CharFnTerms terms(double tau, cplx k, const Kernel& ker, bool with_correction) {
  const auto& h = ker.dyn;
  const double v2 = h.vol_of_var * h.vol_of_var;
  const cplx bk = h.kappa + I * k * (h.corr * h.vol_of_var);
  const cplx d = std::sqrt(v2 * (k * k - I * k) + bk * bk);
  const cplx plus = bk + d;
  const cplx minus = bk - d;
  if (std::abs(plus) < 1e-300) throw DegenerateError("char_fn_terms: b(k) + d(k) vanished");
  const cplx g2 = minus / plus;
  const cplx E = std::exp(-tau * d);
  const cplx one_minus_g2E = 1.0 - g2 * E;

  CharFnTerms t;
  t.d = d;
  // g itself is unbounded near k = 0; it is reported for inspection only.
  t.g = std::abs(minus) < 1e-12 ? cplx{std::numeric_limits<double>::infinity(), 0.0} : plus / minus;
  t.D = minus / v2 * (1.0 - E) / one_minus_g2E;
  t.C = (h.kappa * h.long_run / v2) * (minus * tau - 2.0 * std::log(one_minus_g2E / (1.0 - g2)));
  t.b = -0.5 * ker.w3_eps * (I * k * k * k + k * k);
  if (with_correction) {
    if (std::abs(one_minus_g2E) < 1e-12) {
      throw DegenerateError("correction_factors: g(k) exp(tau d(k)) = 1; move k off the pole");
    }
    const cplx td = tau * d;
    t.f1_hat = ((1.0 - E) * (1.0 + g2 * g2 * E) - 2.0 * td * g2 * E) /
               (d * one_minus_g2E * one_minus_g2E);
    t.f0_hat = (E * (1.0 - g2 * g2 + 2.0 * td * g2) / one_minus_g2E + td - 1.0 - g2) / (d * d);
  }
  return t;
}

// Both accumulators of the inversion integral, folded over +-u so the
// imaginary parts cancel pointwise for a conjugate-symmetric integrand.
struct Inversion {
  double leading;
  double correction;
  double imag_residue;
};

Inversion invert(const Kernel& ker, double spot, double strike, double tau, double r, double xi,
                 const QuadratureConfig& quad, bool with_correction) {
  const double log_moneyness = std::log(strike / spot) - r * tau;  // log K - q
  const double alpha = quad.contour_shift;
  const double drift_coef = ker.dyn.kappa * ker.dyn.long_run;

  auto at = [&](double u) -> std::array<cplx, 2> {
    const cplx k{u, alpha};
    const CharFnTerms t = terms(tau, k, ker, with_correction);
    const cplx expo = t.C + xi * t.D;
    if (expo.real() > kMaxExponent) {
      throw OverflowError("char_fn_G: exponent overflow; truncation range too wide");
    }
    // e^{-ikq} h(k) = K e^{ik(log K - q)} / (ik - k^2)
    const cplx base = std::exp(expo + I * k * log_moneyness) * strike / (I * k - k * k);
    const cplx corr = with_correction ? base * t.b * (drift_coef * t.f0_hat + xi * t.f1_hat) : cplx{};
    return {base, corr};
  };
  auto folded = [&](double u) -> std::array<cplx, 2> {
    auto a = at(u);
    auto b = at(-u);
    return {a[0] + b[0], a[1] + b[1]};
  };

  const double abs_tol = quad.abs_tol * strike * 2.0 * std::numbers::pi * std::exp(r * tau);
  double L = quad.truncation;
  auto body = quad::integrate(folded, 0.0, L, abs_tol, quad.rel_tol, quad.max_nodes);
  std::array<cplx, 2> sum = body.value;
  std::size_t used = body.evaluations;
  while (true) {
    if (2.0 * L > kMaxTruncation) {
      throw QuadratureError("price_spx: tail of the inversion integral does not decay", 0.0);
    }
    const std::size_t remaining = quad.max_nodes > used ? quad.max_nodes - used : 0;
    auto tail = quad::integrate(folded, L, 2.0 * L, abs_tol, quad.rel_tol, remaining);
    used += tail.evaluations;
    sum[0] += tail.value[0];
    sum[1] += tail.value[1];
    L *= 2.0;
    if (quad::magnitude(tail.value) < abs_tol) break;
  }

  const double scale = std::exp(-r * tau) / (2.0 * std::numbers::pi);
  Inversion out;
  out.leading = scale * sum[0].real();
  out.correction = scale * sum[1].real();
  const double re = std::abs(sum[0].real() + sum[1].real());
  const double im = std::abs(sum[0].imag() + sum[1].imag());
  out.imag_residue = re > 0.0 ? im / re : im;
  return out;
}

Kernel kernel_of(const ModelParams& p) { return {effective_heston(p), p.w3_eps}; }

}  // namespace

void SpxOptionSpec::validate() const {
  if (!(spot > 0.0) || !(strike > 0.0) || !(tau > 0.0)) {
    throw DomainError("SpxOptionSpec: spot, strike and tau must be > 0");
  }
}

void HestonParams::validate() const {
  if (!(kappa > 0.0) || !(theta > 0.0) || !(sigma > 0.0) || !(rho >= -1.0 && rho <= 1.0)) {
    throw DomainError("HestonParams: need kappa, theta, sigma > 0 and rho in [-1, 1]");
  }
}

EffectiveHeston effective_heston(const ModelParams& p) {
  return {p.kappa, 2.0 * p.theta, std::numbers::sqrt2 * p.sigma, p.rho / std::numbers::sqrt2};
}

CharFnTerms char_fn_terms(double tau, cplx k, const EffectiveHeston& dyn, double w3_eps) {
  return terms(tau, k, {dyn, w3_eps}, tau > 0.0);
}

CharFnTerms char_fn_terms(double tau, cplx k, const ModelParams& params) {
  return char_fn_terms(tau, k, effective_heston(params), params.w3_eps);
}

cplx char_fn_G(double tau, cplx k, double xi, const ModelParams& params) {
  if (!(tau >= 0.0)) throw DomainError("char_fn_G: tau must be >= 0");
  if (tau == 0.0) return 1.0;
  const CharFnTerms t = terms(tau, k, kernel_of(params), false);
  const cplx expo = t.C + xi * t.D;
  if (expo.real() > kMaxExponent) throw OverflowError("char_fn_G: exponent overflow");
  return std::exp(expo);
}

CorrectionFactors correction_factors(double tau, cplx k, const ModelParams& params) {
  if (!(tau > 0.0)) throw DomainError("correction_factors: tau must be > 0");
  const CharFnTerms t = terms(tau, k, kernel_of(params), true);
  return {t.f0_hat, t.f1_hat, t.b};
}

PriceDecomposition price_spx_call(const SpxOptionSpec& spec, const HiddenState& state,
                                  const ModelParams& params, const QuadratureConfig& quad) {
  spec.validate();
  params.validate();
  quad.validate();
  if (!(state.z >= 0.0)) throw DomainError("price_spx_call: z must be >= 0");
  const bool with_correction = params.w3_eps != 0.0;
  const Inversion inv = invert(kernel_of(params), spec.spot, spec.strike, spec.tau, params.r,
                               2.0 * state.z, quad, with_correction);
  PriceDecomposition out;
  out.leading = inv.leading;
  out.correction = inv.correction;
  out.total = inv.leading + inv.correction;
  out.imag_residue = inv.imag_residue;
  out.asymptotics_invalid = spec.tau < kOneDay;
  return out;
}

PriceDecomposition price_spx_put(const SpxOptionSpec& spec, const HiddenState& state,
                                 const ModelParams& params, const QuadratureConfig& quad) {
  PriceDecomposition out = price_spx_call(spec, state, params, quad);
  const double parity = spec.strike * std::exp(-params.r * spec.tau) - spec.spot;
  out.leading += parity;
  out.total = out.leading + out.correction;
  return out;
}

PriceDecomposition price_spx(const SpxOptionSpec& spec, const HiddenState& state,
                             const ModelParams& params, const QuadratureConfig& quad) {
  return spec.is_call ? price_spx_call(spec, state, params, quad)
                      : price_spx_put(spec, state, params, quad);
}

std::vector<PriceDecomposition> price_spx_batch(std::span<const SpxOptionSpec> specs,
                                                const HiddenState& state,
                                                const ModelParams& params,
                                                const QuadratureConfig& quad) {
  std::vector<PriceDecomposition> out(specs.size());
  parallel_for(specs.size(), [&](std::size_t i) { out[i] = price_spx(specs[i], state, params, quad); });
  return out;
}

double price_heston(const SpxOptionSpec& spec, double v0, const HestonParams& params,
                    const QuadratureConfig& quad) {
  spec.validate();
  params.validate();
  quad.validate();
  if (!(v0 >= 0.0)) throw DomainError("price_heston: v0 must be >= 0");
  const Kernel ker{{params.kappa, params.theta, params.sigma, params.rho}, 0.0};
  const Inversion inv = invert(ker, spec.spot, spec.strike, spec.tau, params.r, v0, quad, false);
  double price = inv.leading;
  if (!spec.is_call) price += spec.strike * std::exp(-params.r * spec.tau) - spec.spot;
  return price;
}

}  // namespace msv

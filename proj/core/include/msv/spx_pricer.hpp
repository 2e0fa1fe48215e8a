#pragma once

#include <complex>
#include <span>
#include <vector>

#include "msv/model.hpp"

namespace msv {

using cplx = std::complex<double>;

struct SpxOptionSpec {
  double spot = 0.0;
  double strike = 0.0;
  double tau = 0.0;
  bool is_call = true;

  void validate() const;
};

/// Leading term, first correction and their sum for one option.
struct PriceDecomposition {
  double leading = 0.0;
  double correction = 0.0;
  double total = 0.0;
  /// Maturity below one day: the expansion is not trustworthy there.
  bool asymptotics_invalid = false;
  /// |Im| / |Re| of the inversion integral (SPX only).
  double imag_residue = 0.0;
};

/// Single-factor variance dynamics dV = kappa (long_run - V) dt + vol_of_var sqrt(V) dB,
/// with corr(dB, dW) = corr. The averaged leading-order operator of the
/// two-factor model is of this form with V = 2z.
struct EffectiveHeston {
  double kappa = 0.0;
  double long_run = 0.0;
  double vol_of_var = 0.0;
  double corr = 0.0;
};

/// (kappa, 2 theta, sqrt(2) sigma, rho / sqrt(2)).
[[nodiscard]] EffectiveHeston effective_heston(const ModelParams& params);

/// Coefficients of the transform G(tau, k, xi) = exp(C + xi D) and the
/// auxiliaries of the first-order correction.
struct CharFnTerms {
  cplx C;
  cplx D;
  cplx d;
  cplx g;
  cplx b;
  cplx f0_hat;
  cplx f1_hat;
};

struct CorrectionFactors {
  cplx f0_hat;
  cplx f1_hat;
  cplx b;
};

/// Full set of transform terms at (tau, k). The square root d(k) is taken on
/// the principal branch (Re d >= 0) and the ratios are evaluated through
/// 1/g(k) so that no exponential grows along the contour.
[[nodiscard]] CharFnTerms char_fn_terms(double tau, cplx k, const EffectiveHeston& dyn, double w3_eps);
[[nodiscard]] CharFnTerms char_fn_terms(double tau, cplx k, const ModelParams& params);

/// exp(C(tau, k) + xi D(tau, k)). Throws OverflowError if the exponent leaves
/// the double range.
[[nodiscard]] cplx char_fn_G(double tau, cplx k, double xi, const ModelParams& params);

/// Closed forms of f0_hat, f1_hat and b(k). Throws DegenerateError at the
/// pole g(k) e^{tau d(k)} = 1.
[[nodiscard]] CorrectionFactors correction_factors(double tau, cplx k, const ModelParams& params);

/// Leading term plus first correction for a European call on the index.
[[nodiscard]] PriceDecomposition price_spx_call(const SpxOptionSpec& spec, const HiddenState& state,
                                                const ModelParams& params,
                                                const QuadratureConfig& quad = {});

/// Put through parity; the parity adjustment lives entirely in the leading term.
[[nodiscard]] PriceDecomposition price_spx_put(const SpxOptionSpec& spec, const HiddenState& state,
                                               const ModelParams& params,
                                               const QuadratureConfig& quad = {});

/// Dispatches on spec.is_call.
[[nodiscard]] PriceDecomposition price_spx(const SpxOptionSpec& spec, const HiddenState& state,
                                           const ModelParams& params,
                                           const QuadratureConfig& quad = {});

/// Prices many options concurrently; output order matches input order.
[[nodiscard]] std::vector<PriceDecomposition> price_spx_batch(std::span<const SpxOptionSpec> specs,
                                                              const HiddenState& state,
                                                              const ModelParams& params,
                                                              const QuadratureConfig& quad = {});

/// Single-factor benchmark, in its own parameters.
struct HestonParams {
  double kappa = 3.43;
  double theta = 0.04;
  double sigma = 0.424;
  double rho = -1.0;
  double r = 0.02;

  void validate() const;
};

/// Heston call or put (spec.is_call) with initial variance v0.
[[nodiscard]] double price_heston(const SpxOptionSpec& spec, double v0, const HestonParams& params,
                                  const QuadratureConfig& quad = {});

}  // namespace msv

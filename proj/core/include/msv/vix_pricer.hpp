#pragma once

#include <span>
#include <vector>

#include "msv/model.hpp"
#include "msv/ncx2.hpp"
#include "msv/spx_pricer.hpp"

namespace msv {

struct VixOptionSpec {
  double strike = 0.0;  ///< VIX points
  double tau = 0.0;
  bool is_call = true;

  void validate() const;
};

/// Leading payoff (100 sqrt(a2* v + (1 + a4*) theta) - K)^+ of the terminal
/// slow variance v.
[[nodiscard]] double payoff_h0(double v, const ModelParams& params, double strike);

/// First-order payoff correction. Zero below the same exercise threshold as h0.
[[nodiscard]] double payoff_h1star(double v, const HiddenState& state, double tau,
                                   const ModelParams& params, double strike);

/// Exercise threshold v* in decimal variance (may be negative: always exercised).
[[nodiscard]] double vix_exercise_threshold(const ModelParams& params, double strike);

/// Leading term plus first correction for a VIX call, integrated against the
/// chi-square law of the terminal slow variance.
[[nodiscard]] PriceDecomposition price_vix_call(const VixOptionSpec& spec, const HiddenState& state,
                                                const ModelParams& params,
                                                const QuadratureConfig& quad = {});

/// Put from parity against the undiscounted zero-strike call (the model VIX forward).
[[nodiscard]] PriceDecomposition price_vix_put(const VixOptionSpec& spec, const HiddenState& state,
                                               const ModelParams& params,
                                               const QuadratureConfig& quad = {});

[[nodiscard]] PriceDecomposition price_vix(const VixOptionSpec& spec, const HiddenState& state,
                                           const ModelParams& params,
                                           const QuadratureConfig& quad = {});

[[nodiscard]] std::vector<PriceDecomposition> price_vix_batch(std::span<const VixOptionSpec> specs,
                                                              const HiddenState& state,
                                                              const ModelParams& params,
                                                              const QuadratureConfig& quad = {});

/// Single-factor benchmark VIX option, VIX = 100 sqrt(b2* v + b4* theta).
[[nodiscard]] double price_heston_vix(const VixOptionSpec& spec, double v0, const HestonParams& params,
                                      const QuadratureConfig& quad = {});

}  // namespace msv

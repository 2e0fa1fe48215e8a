#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "msv/model.hpp"
#include "msv/spx_pricer.hpp"
#include "msv/vix_pricer.hpp"

namespace msv {

/// Full two-factor dynamics, including the fast-factor coordinates (eta, nu)
/// that the analytic formulas only see through w3_eps = -eta nu sqrt(eps/2).
struct McModelParams {
  ModelParams base;
  double eta = 0.0;
  double nu = 0.0;

  /// Keeps base.w3_eps and solves for eta.
  [[nodiscard]] static McModelParams from_nu(const ModelParams& base, double nu);
  /// Keeps (eta, nu) and overwrites base.w3_eps to match.
  [[nodiscard]] static McModelParams from_eta_nu(ModelParams base, double eta, double nu);

  /// Throws DomainError if |eta| > 1, nu <= 0 or w3_eps is inconsistent.
  void validate() const;

  /// Cholesky factor of the correlation of (W^Y, W^{X,1}, W^Z, W^{X,2}).
  [[nodiscard]] std::array<std::array<double, 4>, 4> correlation_factor() const;
};

[[nodiscard]] double w3_from_eta_nu(double eta, double nu, double epsilon);

struct McConfig {
  std::size_t paths = 1'000'000;
  double dt = 0.0;  ///< 0 selects min(eps/20, 1/2000)
  std::uint64_t seed = 20190812;
  bool antithetic = true;
  std::string scheme = "full-truncation-euler";

  void validate(const McModelParams& params) const;
  /// Step size actually used for a horizon: the largest uniform step not
  /// exceeding the configured one.
  [[nodiscard]] double step_for(const McModelParams& params, double horizon) const;
};

struct McEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
  std::size_t paths_used = 0;
};

struct TerminalSamples {
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> z;
};

/// Terminal (X, Y, Z) for every path under full-truncation Euler.
[[nodiscard]] TerminalSamples simulate_terminal(const McModelParams& params, const HiddenState& state0,
                                                double x0, double horizon, const McConfig& cfg);

[[nodiscard]] McEstimate mc_price_spx(const McModelParams& params, const HiddenState& state0,
                                      const SpxOptionSpec& spec, const McConfig& cfg);

/// One simulation, many strikes (calls or puts per spec flag).
[[nodiscard]] std::vector<McEstimate> mc_price_spx_strikes(const McModelParams& params,
                                                           const HiddenState& state0, double x0,
                                                           double tau, std::span<const double> strikes,
                                                           bool is_call, const McConfig& cfg);

[[nodiscard]] McEstimate mc_price_vix(const McModelParams& params, const HiddenState& state0,
                                      const VixOptionSpec& spec, const McConfig& cfg);

[[nodiscard]] std::vector<McEstimate> mc_price_vix_strikes(const McModelParams& params,
                                                           const HiddenState& state0, double tau,
                                                           std::span<const double> strikes,
                                                           bool is_call, const McConfig& cfg);

/// Moments of the terminal factors, E[X_T], E[Y_T], E[Z_T], E[Z_T^2].
struct TerminalMoments {
  McEstimate x;
  McEstimate y;
  McEstimate z;
  McEstimate z_squared;
};

[[nodiscard]] TerminalMoments mc_terminal_moments(const McModelParams& params,
                                                  const HiddenState& state0, double x0,
                                                  double horizon, const McConfig& cfg);

/// <(y - z) psi_n(y)> under the Gamma(z/nu^2, nu^2) invariant law of the fast
/// factor, psi_n the normalised Laguerre eigenfunctions of its generator.
[[nodiscard]] double spectral_coefficient_check(double nu, double z, int n);

/// Closed-form conditional means used to check the simulator.
[[nodiscard]] double expected_z(double z0, double horizon, const ModelParams& params);
[[nodiscard]] double expected_y(const HiddenState& state0, double horizon, const ModelParams& params);

}  // namespace msv

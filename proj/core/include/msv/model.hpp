#pragma once

#include <cstddef>

namespace msv {

/// VIX averaging horizon: 30 calendar days.
inline constexpr double kVixHorizon = 30.0 / 365.0;

/// Calibrated parameters of the two-factor model plus the risk-free rate.
///
/// The slow factor Z is a CIR process (kappa, theta, sigma) correlated with the
/// asset through rho; the fast factor Y reverts to Z at rate 1/epsilon and
/// enters the analytic formulas only through epsilon and w3_eps.
struct ModelParams {
  double kappa = 3.58;
  double theta = 0.021;
  double sigma = 0.347;
  double rho = -1.0;
  double epsilon = 0.0096;
  double w3_eps = 0.0150;
  double r = 0.02;

  /// Throws DomainError unless kappa, theta, sigma, epsilon > 0, rho in
  /// [-1, 1] and kappa < 1/epsilon.
  void validate() const;

  /// 2 kappa theta >= sigma^2. Reported only; never enforced.
  [[nodiscard]] bool feller_satisfied() const noexcept;
};

struct HiddenState {
  double y = 0.0;  ///< fast variance factor
  double z = 0.0;  ///< slow variance factor

  void validate() const;
};

/// Weights of the VIX-squared representation a1 y + a2 z + (a3 + a4) theta,
/// together with their epsilon -> 0 limits.
struct VixWeights {
  double a1 = 0.0;
  double a2 = 0.0;
  double a3 = 0.0;
  double a4 = 0.0;
  double a2_star = 0.0;
  double a4_star = 0.0;
  double tau0 = kVixHorizon;

  [[nodiscard]] double b2_star() const noexcept { return 0.5 * a2_star; }
  [[nodiscard]] double b4_star() const noexcept { return 0.5 * (1.0 + a4_star); }
};

/// Settings shared by the Fourier (SPX) and chi-square (VIX) integrations.
struct QuadratureConfig {
  double contour_shift = 1.5;  ///< Im(k) of the inversion contour
  double truncation = 200.0;   ///< initial half-width of the Re(k) range
  double abs_tol = 1e-8;       ///< absolute tolerance; SPX scales it by K
  double rel_tol = 1e-8;
  std::size_t max_nodes = 400000;

  void validate() const;
};

[[nodiscard]] VixWeights vix_weights(double kappa, double epsilon);

/// Limit weights only (epsilon -> 0); valid for any kappa > 0.
[[nodiscard]] VixWeights vix_weights_limit(double kappa);

/// VIX^2 / 100^2 implied by a hidden state.
[[nodiscard]] double vix_squared_from_state(const HiddenState& state, const ModelParams& params);

/// Model VIX in index points.
[[nodiscard]] double vix_from_state(const HiddenState& state, const ModelParams& params);

/// VIX in the epsilon -> 0 limit, 100 sqrt(a2* z + (1 + a4*) theta).
[[nodiscard]] double vix_limit_from_z(double z, const ModelParams& params);

/// Solves the VIX constraint for z given y. Throws InfeasibleStateError when
/// the solution is negative.
[[nodiscard]] double z_from_vix_given_y(double vix, double y, const ModelParams& params);

/// Largest y for which z_from_vix_given_y stays non-negative.
[[nodiscard]] double max_feasible_y(double vix, const ModelParams& params);

/// Single-factor (Heston) inversion VIX = 100 sqrt(b2* z + b4* theta).
[[nodiscard]] double z_from_vix_heston(double vix, double kappa, double theta);

[[nodiscard]] double vix_from_z_heston(double z, double kappa, double theta);

/// First-order expansion of VIX^2 - VIX*^2 in epsilon, in index points squared.
[[nodiscard]] double delta_vix_squared(const HiddenState& state, const ModelParams& params);

}  // namespace msv

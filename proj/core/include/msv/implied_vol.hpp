#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "msv/model.hpp"

namespace msv {

struct ImpliedVolPoint {
  double strike = 0.0;
  double maturity = 0.0;
  double implied_vol = 0.0;
  bool converged = false;
  int iterations = 0;
};

inline constexpr int kImpliedVolBudget = 100;

/// Call price when VIX follows dVIX = sigma_n dW (VIX points per sqrt(year)).
[[nodiscard]] double vix_normal_price(double vix_level, double strike, double tau, double sigma_n);

/// Inverts vix_normal_price. Throws NoRootError if price <= intrinsic.
[[nodiscard]] ImpliedVolPoint vix_normal_implied_vol(double price, double vix_level, double strike,
                                                     double tau);

/// Black-Scholes call on spot x with rate r.
[[nodiscard]] double bs_call_price(double x, double strike, double tau, double r, double sigma);
[[nodiscard]] double bs_vega(double x, double strike, double tau, double r, double sigma);

/// Inverts bs_call_price. Throws NoRootError outside ((x - K e^{-r tau})^+, x).
[[nodiscard]] ImpliedVolPoint bs_implied_vol(double price, double x, double strike, double tau,
                                             double r);

/// Strike-by-maturity grid of values; rows follow strikes, columns maturities.
struct SurfaceGrid {
  std::vector<double> strikes;
  std::vector<double> maturities;
  std::vector<std::vector<double>> values;
};

/// CSV with a header "strike,<tau_1>,...,<tau_m>" and one row per strike.
void write_surface_csv(std::ostream& os, const SurfaceGrid& grid);

enum class SurfaceKind { corrected, uncorrected, difference };

/// Corrected vols price with the full model at `state`; uncorrected ones use
/// the leading term alone at y = z = z_uncorrected. VIX vols are normal-model
/// vols around the model VIX of each state, SPX vols are Black-Scholes.
struct SurfaceRequest {
  bool vix = true;
  SurfaceKind kind = SurfaceKind::difference;
  double spot = 2000.0;
  HiddenState state{0.0234, 0.0194};
  double z_uncorrected = 0.0197;
  std::vector<double> strikes;
  std::vector<double> maturities;
};

/// Cells whose price admits no implied vol are NaN.
[[nodiscard]] SurfaceGrid implied_vol_surface(const SurfaceRequest& request, const ModelParams& params,
                                              const QuadratureConfig& quad = {});

}  // namespace msv

#include "msv/model.hpp"

#include <cmath>
#include <sstream>

#include "msv/errors.hpp"

namespace msv {

namespace {

// (1 - e^{-x}) / x without cancellation for small x.
double one_minus_exp_over(double x) {
  if (std::abs(x) < 1e-8) return 1.0 - 0.5 * x;
  return -std::expm1(-x) / x;
}

}  // namespace

void ModelParams::validate() const {
  std::ostringstream why;
  if (!(kappa > 0.0)) why << "kappa must be > 0; ";
  if (!(theta > 0.0)) why << "theta must be > 0; ";
  if (!(sigma > 0.0)) why << "sigma must be > 0; ";
  if (!(epsilon > 0.0)) why << "epsilon must be > 0; ";
  if (!(rho >= -1.0 && rho <= 1.0)) why << "rho must lie in [-1, 1]; ";
  if (!std::isfinite(w3_eps)) why << "w3_eps must be finite; ";
  if (!std::isfinite(r)) why << "r must be finite; ";
  if (kappa > 0.0 && epsilon > 0.0 && !(kappa * epsilon < 1.0)) {
    why << "time-scale separation requires kappa < 1/epsilon; ";
  }
  if (!why.str().empty()) throw DomainError("ModelParams: " + why.str());
}

bool ModelParams::feller_satisfied() const noexcept {
  return 2.0 * kappa * theta >= sigma * sigma;
}

void HiddenState::validate() const {
  if (!(y >= 0.0) || !(z >= 0.0)) throw DomainError("HiddenState: y and z must be >= 0");
  if (!(y > 0.0 || z > 0.0)) throw DomainError("HiddenState: y and z are both zero");
}

void QuadratureConfig::validate() const {
  if (!(contour_shift > 1.0)) {
    throw ContourError("QuadratureConfig: contour_shift must exceed 1 for the payoff transform");
  }
  if (!(truncation > 0.0)) throw ConfigError("QuadratureConfig: truncation must be > 0");
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) {
    throw ConfigError("QuadratureConfig: tolerances must be > 0");
  }
  if (max_nodes < 15) throw ConfigError("QuadratureConfig: max_nodes too small");
}

VixWeights vix_weights_limit(double kappa) {
  if (!(kappa > 0.0)) throw DomainError("vix_weights: kappa must be > 0");
  VixWeights w;
  w.a2_star = 2.0 * one_minus_exp_over(kappa * kVixHorizon);
  w.a4_star = 1.0 - w.a2_star;
  return w;
}

VixWeights vix_weights(double kappa, double epsilon) {
  if (!(kappa > 0.0) || !(epsilon > 0.0)) {
    throw DomainError("vix_weights: kappa and epsilon must be > 0");
  }
  if (!(kappa * epsilon < 1.0)) {
    throw DomainError("vix_weights: kappa * epsilon must be < 1");
  }
  VixWeights w = vix_weights_limit(kappa);
  const double slow = one_minus_exp_over(kappa * kVixHorizon);
  w.a1 = one_minus_exp_over(kVixHorizon / epsilon);
  w.a2 = slow + (slow - w.a1) / (1.0 - kappa * epsilon);
  w.a3 = 1.0 - w.a1;
  w.a4 = 1.0 - w.a2;
  return w;
}

double vix_squared_from_state(const HiddenState& state, const ModelParams& params) {
  const VixWeights w = vix_weights(params.kappa, params.epsilon);
  return w.a1 * state.y + w.a2 * state.z + (w.a3 + w.a4) * params.theta;
}

double vix_from_state(const HiddenState& state, const ModelParams& params) {
  if (!(state.y >= 0.0) || !(state.z >= 0.0)) throw DomainError("vix_from_state: negative hidden state");
  const double radicand = vix_squared_from_state(state, params);
  if (!(radicand > 0.0)) {
    throw DomainError("vix_from_state: negative VIX radicand (corrupted state)");
  }
  return 100.0 * std::sqrt(radicand);
}

double vix_limit_from_z(double z, const ModelParams& params) {
  const VixWeights w = vix_weights_limit(params.kappa);
  const double radicand = w.a2_star * z + (1.0 + w.a4_star) * params.theta;
  if (!(radicand > 0.0)) throw DomainError("vix_limit_from_z: negative radicand");
  return 100.0 * std::sqrt(radicand);
}

double z_from_vix_given_y(double vix, double y, const ModelParams& params) {
  if (!(vix > 0.0)) throw DomainError("z_from_vix_given_y: vix must be > 0");
  if (!(y >= 0.0)) throw DomainError("z_from_vix_given_y: y must be >= 0");
  const VixWeights w = vix_weights(params.kappa, params.epsilon);
  const double level = (vix / 100.0) * (vix / 100.0);
  const double z = (level - w.a1 * y - (w.a3 + w.a4) * params.theta) / w.a2;
  if (z < 0.0) {
    throw InfeasibleStateError("z_from_vix_given_y: y too large for this VIX level", z);
  }
  return z;
}

double max_feasible_y(double vix, const ModelParams& params) {
  const VixWeights w = vix_weights(params.kappa, params.epsilon);
  const double level = (vix / 100.0) * (vix / 100.0);
  return (level - (w.a3 + w.a4) * params.theta) / w.a1;
}

double z_from_vix_heston(double vix, double kappa, double theta) {
  if (!(vix > 0.0)) throw DomainError("z_from_vix_heston: vix must be > 0");
  const VixWeights w = vix_weights_limit(kappa);
  const double level = (vix / 100.0) * (vix / 100.0);
  const double z = (level - w.b4_star() * theta) / w.b2_star();
  if (z < 0.0) throw InfeasibleStateError("z_from_vix_heston: VIX below the theta floor", z);
  return z;
}

double vix_from_z_heston(double z, double kappa, double theta) {
  const VixWeights w = vix_weights_limit(kappa);
  const double radicand = w.b2_star() * z + w.b4_star() * theta;
  if (!(radicand > 0.0)) throw DomainError("vix_from_z_heston: negative radicand");
  return 100.0 * std::sqrt(radicand);
}

double delta_vix_squared(const HiddenState& state, const ModelParams& params) {
  const double eps = params.epsilon;
  const double t0 = kVixHorizon;
  const double fast = -std::expm1(-t0 / eps);
  const double slow = -std::expm1(-params.kappa * t0);
  return 1e4 * (eps / t0) * (fast * (state.y - state.z) + slow * (state.z - params.theta));
}

}  // namespace msv

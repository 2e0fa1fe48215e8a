#include "msv/vix_pricer.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "msv/errors.hpp"
#include "msv/parallel.hpp"
#include "msv/quadrature.hpp"

namespace msv {

namespace {

constexpr double kOneDay = 1.0 / 365.0;
constexpr double kMaxUpperDoublings = 40;

// Inputs of the zeta-integral common to the two-factor and benchmark models.
struct VixIntegrand {
  Ncx2Params law;
  double a2_star;
  double floor_level;  // (1 + a4*) theta
  double strike;
  // Correction h1* = 100 (fast + slope (v - theta)) / (4 sqrt(.)), or none.
  bool with_correction = false;
  double fast = 0.0;
  double slope = 0.0;
  double theta = 0.0;
};

std::array<double, 2> integrate_vix(const VixIntegrand& in, const QuadratureConfig& quad) {
  const double threshold = ((in.strike / 100.0) * (in.strike / 100.0) - in.floor_level) / in.a2_star;
  const double zeta_kink = std::max(0.0, threshold / in.law.scale);

  auto f = [&](double zeta) -> std::array<double, 2> {
    const double v = in.law.scale * zeta;
    const double root = std::sqrt(in.a2_star * v + in.floor_level);
    const double payoff = 100.0 * root - in.strike;
    if (payoff <= 0.0) return {0.0, 0.0};
    const double density = ncx2_pdf(zeta, in.law);
    const double corr =
        in.with_correction ? 100.0 * (in.fast + in.slope * (v - in.theta)) / (4.0 * root) : 0.0;
    return {payoff * density, corr * density};
  };

  const double k = in.law.dof;
  const double lam = in.law.noncentrality;
  double upper = k + lam + 40.0 * std::sqrt(2.0 * (k + 2.0 * lam));
  std::array<double, 2> sum{0.0, 0.0};
  std::size_t used = 0;
  if (upper > zeta_kink) {
    auto body = quad::integrate(f, zeta_kink, upper, quad.abs_tol, quad.rel_tol, quad.max_nodes);
    sum = body.value;
    used = body.evaluations;
  } else {
    upper = zeta_kink;
  }
  for (int i = 0; i < kMaxUpperDoublings; ++i) {
    const std::size_t remaining = quad.max_nodes > used ? quad.max_nodes - used : 0;
    auto tail = quad::integrate(f, upper, 2.0 * upper + 1.0, quad.abs_tol, quad.rel_tol, remaining);
    used += tail.evaluations;
    sum[0] += tail.value[0];
    sum[1] += tail.value[1];
    upper = 2.0 * upper + 1.0;
    if (quad::magnitude(tail.value) < quad.abs_tol) return sum;
  }
  throw QuadratureError("price_vix: chi-square tail did not fall below tolerance", 0.0);
}

VixIntegrand integrand_for(const VixOptionSpec& spec, const HiddenState& state,
                           const ModelParams& p, bool with_correction) {
  const VixWeights w = vix_weights(p.kappa, p.epsilon);
  VixIntegrand in;
  in.law = cir_transition(state.z, spec.tau, p.kappa, p.theta, p.sigma);
  in.a2_star = w.a2_star;
  in.floor_level = (1.0 + w.a4_star) * p.theta;
  in.strike = spec.strike;
  in.with_correction = with_correction;
  in.fast = 2.0 * std::exp(-spec.tau / p.epsilon) * w.a1 * (state.y - state.z);
  in.slope = p.kappa * p.epsilon * w.a2_star;
  in.theta = p.theta;
  return in;
}

}  // namespace

void VixOptionSpec::validate() const {
  if (!(strike >= 0.0) || !(tau > 0.0)) throw DomainError("VixOptionSpec: need strike >= 0, tau > 0");
}

double vix_exercise_threshold(const ModelParams& params, double strike) {
  const VixWeights w = vix_weights_limit(params.kappa);
  return ((strike / 100.0) * (strike / 100.0) - (1.0 + w.a4_star) * params.theta) / w.a2_star;
}

double payoff_h0(double v, const ModelParams& params, double strike) {
  const VixWeights w = vix_weights_limit(params.kappa);
  const double level = 100.0 * std::sqrt(w.a2_star * v + (1.0 + w.a4_star) * params.theta);
  return std::max(level - strike, 0.0);
}

double payoff_h1star(double v, const HiddenState& state, double tau, const ModelParams& params,
                     double strike) {
  const VixWeights w = vix_weights(params.kappa, params.epsilon);
  const double root = std::sqrt(w.a2_star * v + (1.0 + w.a4_star) * params.theta);
  if (100.0 * root < strike) return 0.0;
  const double fast = 2.0 * std::exp(-tau / params.epsilon) * w.a1 * (state.y - state.z);
  const double slow = params.kappa * params.epsilon * w.a2_star * (v - params.theta);
  return 100.0 * (fast + slow) / (4.0 * root);
}

PriceDecomposition price_vix_call(const VixOptionSpec& spec, const HiddenState& state,
                                  const ModelParams& params, const QuadratureConfig& quad) {
  spec.validate();
  params.validate();
  quad.validate();
  if (!(state.z >= 0.0) || !(state.y >= 0.0)) throw DomainError("price_vix_call: negative state");
  const auto sums = integrate_vix(integrand_for(spec, state, params, true), quad);
  const double disc = std::exp(-params.r * spec.tau);
  PriceDecomposition out;
  out.leading = disc * sums[0];
  out.correction = disc * sums[1];
  out.total = out.leading + out.correction;
  out.asymptotics_invalid = spec.tau < kOneDay;
  return out;
}

PriceDecomposition price_vix_put(const VixOptionSpec& spec, const HiddenState& state,
                                 const ModelParams& params, const QuadratureConfig& quad) {
  PriceDecomposition call = price_vix_call(spec, state, params, quad);
  VixOptionSpec forward_spec = spec;
  forward_spec.strike = 0.0;
  const PriceDecomposition forward = price_vix_call(forward_spec, state, params, quad);
  const double disc_strike = std::exp(-params.r * spec.tau) * spec.strike;
  call.leading = call.leading - forward.leading + disc_strike;
  call.correction = call.correction - forward.correction;
  call.total = call.leading + call.correction;
  return call;
}

PriceDecomposition price_vix(const VixOptionSpec& spec, const HiddenState& state,
                             const ModelParams& params, const QuadratureConfig& quad) {
  return spec.is_call ? price_vix_call(spec, state, params, quad)
                      : price_vix_put(spec, state, params, quad);
}

std::vector<PriceDecomposition> price_vix_batch(std::span<const VixOptionSpec> specs,
                                                const HiddenState& state,
                                                const ModelParams& params,
                                                const QuadratureConfig& quad) {
  std::vector<PriceDecomposition> out(specs.size());
  parallel_for(specs.size(), [&](std::size_t i) { out[i] = price_vix(specs[i], state, params, quad); });
  return out;
}

double price_heston_vix(const VixOptionSpec& spec, double v0, const HestonParams& params,
                        const QuadratureConfig& quad) {
  spec.validate();
  params.validate();
  quad.validate();
  if (!(v0 >= 0.0)) throw DomainError("price_heston_vix: v0 must be >= 0");
  const VixWeights w = vix_weights_limit(params.kappa);
  VixIntegrand in;
  in.law = cir_transition(v0, spec.tau, params.kappa, params.theta, params.sigma);
  in.a2_star = w.b2_star();
  in.floor_level = w.b4_star() * params.theta;
  in.strike = spec.strike;
  const auto sums = integrate_vix(in, quad);
  const double disc = std::exp(-params.r * spec.tau);
  double price = disc * sums[0];
  if (!spec.is_call) {
    VixOptionSpec fwd = spec;
    fwd.strike = 0.0;
    fwd.is_call = true;
    price = price - price_heston_vix(fwd, v0, params, quad) + disc * spec.strike;
  }
  return price;
}

}  // namespace msv

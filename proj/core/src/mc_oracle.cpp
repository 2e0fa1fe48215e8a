#include "msv/mc_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "msv/errors.hpp"
#include "msv/parallel.hpp"
#include "msv/quadrature.hpp"
#include "msv/rng.hpp"

namespace msv {
namespace {

constexpr std::size_t kPairsPerChunk = 1024;

using Factor = std::array<std::array<double, 4>, 4>;

// Lower-triangular factor of a positive semi-definite matrix; zero pivots
// (perfect correlation) leave their column empty.
Factor cholesky(const Factor& a) {
  Factor l{};
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = a[i][j];
      for (int k = 0; k < j; ++k) s -= l[i][k] * l[j][k];
      if (i == j) {
        l[i][i] = s > 1e-14 ? std::sqrt(s) : 0.0;
      } else {
        l[i][j] = l[j][j] > 0.0 ? s / l[j][j] : 0.0;
      }
    }
  }
  return l;
}

struct PathState {
  double log_x;
  double y;
  double z;
};

class Simulator {
 public:
  Simulator(const McModelParams& params, const HiddenState& state0, double horizon,
            const McConfig& cfg)
      : p_(params.base), state0_(state0), factor_(params.correlation_factor()), cfg_(cfg) {
    params.validate();
    state0.validate();
    cfg.validate(params);
    if (!(horizon > 0.0)) throw DomainError("simulation horizon must be positive");
    dt_ = cfg.step_for(params, horizon);
    steps_ = static_cast<std::size_t>(std::llround(horizon / dt_));
    sqrt_dt_ = std::sqrt(dt_);
    fast_vol_ = std::numbers::sqrt2 * params.nu / std::sqrt(p_.epsilon);
  }

  [[nodiscard]] std::size_t draws() const noexcept {
    return cfg_.antithetic ? (cfg_.paths + 1) / 2 : cfg_.paths;
  }
  [[nodiscard]] std::size_t paths_used() const noexcept {
    return cfg_.antithetic ? 2 * draws() : draws();
  }

  // Simulates draw `index`; `out` receives one state, or two for an antithetic pair.
  void run(std::size_t index, PathState* out) const {
    PathRng rng(cfg_.seed, index);
    const int members = cfg_.antithetic ? 2 : 1;
    for (int m = 0; m < members; ++m) out[m] = {0.0, state0_.y, state0_.z};
    double g[4];
    double w[4];
    for (std::size_t s = 0; s < steps_; ++s) {
      rng.normal_pair(g[0], g[1]);
      rng.normal_pair(g[2], g[3]);
      for (int m = 0; m < members; ++m) {
        const double sign = m == 0 ? 1.0 : -1.0;
        for (int i = 0; i < 4; ++i) {
          double acc = 0.0;
          for (int j = 0; j <= i; ++j) acc += factor_[i][j] * g[j];
          w[i] = sign * acc;
        }
        step(out[m], w);
      }
    }
  }

 private:
  // w holds increments of (W^Y, W^{X,1}, W^Z, W^{X,2}) per unit sqrt(dt).
  void step(PathState& st, const double* w) const {
    const double yp = std::max(st.y, 0.0);
    const double zp = std::max(st.z, 0.0);
    const double sy = std::sqrt(yp) * sqrt_dt_;
    const double sz = std::sqrt(zp) * sqrt_dt_;
    st.log_x += (p_.r - 0.5 * (yp + zp)) * dt_ + sy * w[1] + sz * w[3];
    st.y += (zp - yp) / p_.epsilon * dt_ + fast_vol_ * sy * w[0];
    st.z += p_.kappa * (p_.theta - zp) * dt_ + p_.sigma * sz * w[2];
  }

  ModelParams p_;
  HiddenState state0_;
  Factor factor_;
  McConfig cfg_;
  double dt_ = 0.0;
  double sqrt_dt_ = 0.0;
  double fast_vol_ = 0.0;
  std::size_t steps_ = 0;
};

// Runs the simulator and averages payoff(state, out[0..m)) over paths, one
// running sum per output. Chunks are reduced in index order so the result
// does not depend on the worker count.
template <class Payoff>
std::vector<McEstimate> estimate(const Simulator& sim, std::size_t outputs, Payoff&& payoff) {
  const std::size_t n = sim.draws();
  const std::size_t chunks = (n + kPairsPerChunk - 1) / kPairsPerChunk;
  std::vector<double> sums(chunks * outputs * 2, 0.0);
  const bool pairs = sim.paths_used() != n;
  parallel_for(chunks, [&](std::size_t c) {
    std::vector<double> a(outputs), b(outputs);
    PathState st[2];
    double* sum = &sums[c * outputs * 2];
    const std::size_t end = std::min(n, (c + 1) * kPairsPerChunk);
    for (std::size_t i = c * kPairsPerChunk; i < end; ++i) {
      sim.run(i, st);
      payoff(st[0], a.data());
      if (pairs) {
        payoff(st[1], b.data());
        for (std::size_t k = 0; k < outputs; ++k) a[k] = 0.5 * (a[k] + b[k]);
      }
      for (std::size_t k = 0; k < outputs; ++k) {
        sum[2 * k] += a[k];
        sum[2 * k + 1] += a[k] * a[k];
      }
    }
  });
  std::vector<McEstimate> result(outputs);
  for (std::size_t k = 0; k < outputs; ++k) {
    double s = 0.0;
    double s2 = 0.0;
    for (std::size_t c = 0; c < chunks; ++c) {
      s += sums[(c * outputs + k) * 2];
      s2 += sums[(c * outputs + k) * 2 + 1];
    }
    const double dn = static_cast<double>(n);
    const double mean = s / dn;
    const double var = n > 1 ? std::max(0.0, (s2 - dn * mean * mean) / (dn - 1.0)) : 0.0;
    result[k] = {mean, std::sqrt(var / dn), sim.paths_used()};
  }
  return result;
}

double vix_of(const PathState& st, const ModelParams& p, const VixWeights& w) {
  const double v2 = w.a1 * std::max(st.y, 0.0) + w.a2 * std::max(st.z, 0.0) + (w.a3 + w.a4) * p.theta;
  return 100.0 * std::sqrt(v2);
}

}  // namespace

double w3_from_eta_nu(double eta, double nu, double epsilon) {
  return -eta * nu * std::sqrt(epsilon) / std::numbers::sqrt2;
}

McModelParams McModelParams::from_nu(const ModelParams& base, double nu) {
  if (!(nu > 0.0)) throw DomainError("nu must be positive");
  McModelParams p;
  p.base = base;
  p.nu = nu;
  p.eta = -std::numbers::sqrt2 * base.w3_eps / (nu * std::sqrt(base.epsilon));
  p.validate();
  return p;
}

McModelParams McModelParams::from_eta_nu(ModelParams base, double eta, double nu) {
  base.w3_eps = w3_from_eta_nu(eta, nu, base.epsilon);
  McModelParams p{base, eta, nu};
  p.validate();
  return p;
}

void McModelParams::validate() const {
  base.validate();
  if (!(std::abs(eta) <= 1.0))
    throw DomainError("eta = " + std::to_string(eta) + " outside [-1, 1]");
  if (!(nu > 0.0)) throw DomainError("nu must be positive");
  const double implied = w3_from_eta_nu(eta, nu, base.epsilon);
  if (std::abs(implied - base.w3_eps) > 1e-12 * std::max(1.0, std::abs(base.w3_eps)))
    throw DomainError("w3_eps inconsistent with (eta, nu, epsilon)");
}

std::array<std::array<double, 4>, 4> McModelParams::correlation_factor() const {
  Factor corr{};
  for (int i = 0; i < 4; ++i) corr[i][i] = 1.0;
  corr[0][1] = corr[1][0] = eta;
  corr[2][3] = corr[3][2] = base.rho;
  return cholesky(corr);
}

void McConfig::validate(const McModelParams& params) const {
  if (paths < 10000) throw ConfigError("Monte Carlo needs at least 10000 paths");
  if (scheme != "full-truncation-euler") throw ConfigError("unknown scheme '" + scheme + "'");
  if (dt < 0.0) throw ConfigError("dt must be non-negative");
  if (dt > params.base.epsilon / 20.0)
    throw ConfigError("dt = " + std::to_string(dt) + " does not resolve the fast factor (needs <= eps/20)");
}

double McConfig::step_for(const McModelParams& params, double horizon) const {
  const double target = dt > 0.0 ? dt : std::min(params.base.epsilon / 20.0, 1.0 / 2000.0);
  const double n = std::max(1.0, std::ceil(horizon / target - 1e-9));
  return horizon / n;
}

TerminalSamples simulate_terminal(const McModelParams& params, const HiddenState& state0, double x0,
                                  double horizon, const McConfig& cfg) {
  if (!(x0 > 0.0)) throw DomainError("x0 must be positive");
  const Simulator sim(params, state0, horizon, cfg);
  const std::size_t n = sim.draws();
  const std::size_t per = sim.paths_used() / n;
  TerminalSamples out;
  out.x.resize(sim.paths_used());
  out.y.resize(sim.paths_used());
  out.z.resize(sim.paths_used());
  parallel_for(n, [&](std::size_t i) {
    PathState st[2];
    sim.run(i, st);
    for (std::size_t m = 0; m < per; ++m) {
      out.x[i * per + m] = x0 * std::exp(st[m].log_x);
      out.y[i * per + m] = st[m].y;
      out.z[i * per + m] = st[m].z;
    }
  });
  return out;
}

std::vector<McEstimate> mc_price_spx_strikes(const McModelParams& params, const HiddenState& state0,
                                             double x0, double tau, std::span<const double> strikes,
                                             bool is_call, const McConfig& cfg) {
  if (!(x0 > 0.0)) throw DomainError("x0 must be positive");
  for (double k : strikes)
    if (!(k >= 0.0)) throw DomainError("strikes must be non-negative");
  const Simulator sim(params, state0, tau, cfg);
  const double disc = std::exp(-params.base.r * tau);
  return estimate(sim, strikes.size(), [&](const PathState& st, double* out) {
    const double x = x0 * std::exp(st.log_x);
    for (std::size_t k = 0; k < strikes.size(); ++k)
      out[k] = disc * std::max(is_call ? x - strikes[k] : strikes[k] - x, 0.0);
  });
}

McEstimate mc_price_spx(const McModelParams& params, const HiddenState& state0,
                        const SpxOptionSpec& spec, const McConfig& cfg) {
  spec.validate();
  const double strike[] = {spec.strike};
  return mc_price_spx_strikes(params, state0, spec.spot, spec.tau, strike, spec.is_call, cfg).front();
}

std::vector<McEstimate> mc_price_vix_strikes(const McModelParams& params, const HiddenState& state0,
                                             double tau, std::span<const double> strikes, bool is_call,
                                             const McConfig& cfg) {
  for (double k : strikes)
    if (!(k >= 0.0)) throw DomainError("strikes must be non-negative");
  const Simulator sim(params, state0, tau, cfg);
  const VixWeights w = vix_weights(params.base.kappa, params.base.epsilon);
  const double disc = std::exp(-params.base.r * tau);
  return estimate(sim, strikes.size(), [&](const PathState& st, double* out) {
    const double vix = vix_of(st, params.base, w);
    for (std::size_t k = 0; k < strikes.size(); ++k)
      out[k] = disc * std::max(is_call ? vix - strikes[k] : strikes[k] - vix, 0.0);
  });
}

McEstimate mc_price_vix(const McModelParams& params, const HiddenState& state0,
                        const VixOptionSpec& spec, const McConfig& cfg) {
  spec.validate();
  const double strike[] = {spec.strike};
  return mc_price_vix_strikes(params, state0, spec.tau, strike, spec.is_call, cfg).front();
}

TerminalMoments mc_terminal_moments(const McModelParams& params, const HiddenState& state0,
                                    double x0, double horizon, const McConfig& cfg) {
  const Simulator sim(params, state0, horizon, cfg);
  const auto est = estimate(sim, 4, [&](const PathState& st, double* out) {
    out[0] = x0 * std::exp(st.log_x);
    out[1] = st.y;
    out[2] = st.z;
    out[3] = st.z * st.z;
  });
  return {est[0], est[1], est[2], est[3]};
}

double spectral_coefficient_check(double nu, double z, int n) {
  if (!(nu > 0.0) || !(z > 0.0)) throw DomainError("nu and z must be positive");
  if (n < 0 || n > 3) throw DomainError("spectral check supports n in {0, 1, 2, 3}");
  const double gamma = z / (nu * nu);
  const double alpha = gamma - 1.0;
  // psi_n(y) = sqrt(n! Gamma(gamma) / Gamma(n + gamma)) L_n^{(gamma - 1)}(y / nu^2)
  const double norm = std::exp(0.5 * (std::lgamma(n + 1.0) + std::lgamma(gamma) - std::lgamma(n + gamma)));
  auto laguerre = [&](double w) {
    if (n == 0) return 1.0;
    double prev = 1.0;
    double cur = 1.0 + alpha - w;
    for (int k = 1; k < n; ++k) {
      const double next = ((2.0 * k + 1.0 + alpha - w) * cur - (k + alpha) * prev) / (k + 1.0);
      prev = cur;
      cur = next;
    }
    return cur;
  };
  auto body = [&](double w) { return (nu * nu * w - z) * norm * laguerre(w); };
  if (gamma >= 1.0) {
    const double log_norm = -std::lgamma(gamma);
    auto integrand = [&](double w) {
      if (w <= 0.0) return gamma == 1.0 ? body(0.0) : 0.0;
      return std::exp(log_norm + alpha * std::log(w) - w) * body(w);
    };
    const double w_max = gamma + 80.0 + 40.0 * std::sqrt(gamma);
    return quad::integrate(integrand, 0.0, w_max, 1e-15, 1e-13, 2000000).value;
  }
  // With w = y / nu^2 = s^{1/gamma} the Gamma weight w^{gamma-1} e^{-w} dw / Gamma(gamma)
  // becomes e^{-w} ds / Gamma(gamma + 1), which is smooth at the origin.
  const double log_norm = -std::lgamma(gamma + 1.0);
  auto integrand = [&](double s) {
    const double w = s > 0.0 ? std::pow(s, 1.0 / gamma) : 0.0;
    return std::exp(log_norm - w) * body(w);
  };
  const auto r = quad::integrate(integrand, 0.0, std::pow(80.0, gamma), 1e-15, 1e-13, 2000000);
  return r.value;
}

double expected_z(double z0, double horizon, const ModelParams& params) {
  const double e = std::exp(-params.kappa * horizon);
  return z0 * e + params.theta * (1.0 - e);
}

double expected_y(const HiddenState& state0, double horizon, const ModelParams& params) {
  const double ek = std::exp(-params.kappa * horizon);
  const double ef = std::exp(-horizon / params.epsilon);
  const double a = (state0.z - params.theta) / (1.0 - params.kappa * params.epsilon);
  return params.theta + a * ek + (state0.y - params.theta - a) * ef;
}

}  // namespace msv

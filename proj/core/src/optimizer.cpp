#include "msv/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "msv/errors.hpp"

namespace msv {
namespace {

struct Run {
  std::vector<double> u;
  double value;
  int iterations;
  bool converged;
};

Run nelder_mead(const std::function<double(const std::vector<double>&)>& g, const std::vector<double>& u0,
                const NelderMeadSettings& s, std::vector<double>& trace) {
  const std::size_t n = u0.size();
  std::vector<std::vector<double>> simplex(n + 1, u0);
  std::vector<double> values(n + 1);
  for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += s.initial_step;
  for (std::size_t i = 0; i <= n; ++i) values[i] = g(simplex[i]);

  std::vector<std::size_t> order(n + 1);
  auto sort = [&] {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] < values[b]; });
  };
  auto along = [&](const std::vector<double>& c, const std::vector<double>& w, double t) {
    std::vector<double> p(n);
    for (std::size_t j = 0; j < n; ++j) p[j] = c[j] + t * (w[j] - c[j]);
    return p;
  };

  Run run{u0, 0.0, 0, false};
  for (int it = 0; it < s.max_iterations; ++it) {
    sort();
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second = order[n - 1];
    double diameter = 0.0;
    for (std::size_t i = 0; i <= n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        diameter = std::max(diameter, std::abs(simplex[i][j] - simplex[best][j]));
    if (values[worst] - values[best] <= s.f_tol && diameter <= s.x_tol) {
      run.converged = true;
      break;
    }
    run.iterations = it + 1;

    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i <= n; ++i)
      if (i != worst)
        for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i][j] / static_cast<double>(n);

    const auto reflected = along(centroid, simplex[worst], -1.0);
    const double fr = g(reflected);
    if (fr < values[best]) {
      const auto expanded = along(centroid, simplex[worst], -2.0);
      const double fe = g(expanded);
      if (fe < fr) {
        simplex[worst] = expanded;
        values[worst] = fe;
      } else {
        simplex[worst] = reflected;
        values[worst] = fr;
      }
    } else if (fr < values[second]) {
      simplex[worst] = reflected;
      values[worst] = fr;
    } else {
      const bool outside = fr < values[worst];
      const auto contracted = along(centroid, outside ? reflected : simplex[worst], 0.5);
      const double fc = g(contracted);
      if (fc < std::min(fr, values[worst])) {
        simplex[worst] = contracted;
        values[worst] = fc;
      } else {
        for (std::size_t i = 0; i <= n; ++i) {
          if (i == best) continue;
          simplex[i] = along(simplex[best], simplex[i], 0.5);
          values[i] = g(simplex[i]);
        }
      }
    }
    trace.push_back(*std::min_element(values.begin(), values.end()));
  }
  sort();
  run.u = simplex[order.front()];
  run.value = values[order.front()];
  return run;
}

}  // namespace

bool Bound::contains(double x) const {
  return (lo_closed ? x >= lo : x > lo) && (hi_closed ? x <= hi : x < hi);
}

double to_bounded(double u, const Bound& b) {
  const double s = u >= 0.0 ? 1.0 / (1.0 + std::exp(-u)) : std::exp(u) / (1.0 + std::exp(u));
  return b.lo + (b.hi - b.lo) * s;
}

double to_unbounded(double x, const Bound& b) {
  const double width = b.hi - b.lo;
  const double inset = 1e-9 * width;
  const double t = std::clamp(x, b.lo + inset, b.hi - inset);
  return std::log((t - b.lo) / (b.hi - t));
}

OptimizerResult minimize_bounded(const std::function<double(const std::vector<double>&)>& f,
                                 std::vector<double> x0, const std::vector<Bound>& bounds,
                                 const NelderMeadSettings& settings) {
  if (x0.size() != bounds.size() || x0.empty()) throw ConfigError("optimizer needs one bound per parameter");
  for (const auto& b : bounds)
    if (!(b.hi > b.lo)) throw ConfigError("empty parameter bound");

  OptimizerResult out;
  auto decode = [&](const std::vector<double>& u) {
    std::vector<double> x(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) x[i] = to_bounded(u[i], bounds[i]);
    return x;
  };
  auto g = [&](const std::vector<double>& u) {
    ++out.evaluations;
    const double v = f(decode(u));
    return std::isfinite(v) ? v : 1e300;
  };

  std::vector<double> u0(x0.size());
  for (std::size_t i = 0; i < x0.size(); ++i) u0[i] = to_unbounded(x0[i], bounds[i]);

  std::mt19937_64 rng(settings.seed);
  std::normal_distribution<double> normal;
  Run best = nelder_mead(g, u0, settings, out.trace);
  out.iterations = best.iterations;
  out.converged = best.converged;
  for (int r = 0; r < settings.restarts; ++r) {
    std::vector<double> start = best.u;
    for (auto& v : start) v += normal(rng);
    std::vector<double> trace;
    Run run = nelder_mead(g, start, settings, trace);
    for (double t : trace) out.trace.push_back(std::min(t, best.value));
    out.iterations += run.iterations;
    if (run.value < best.value) best = run;
  }

  out.x = decode(best.u);
  out.value = best.value;

  // Boundary snap: the logit map never reaches a closed end exactly.
  for (std::size_t i = 0; i < out.x.size(); ++i) {
    const Bound& b = bounds[i];
    for (const auto& [closed, edge] : {std::pair{b.lo_closed, b.lo}, std::pair{b.hi_closed, b.hi}}) {
      if (!closed || std::abs(out.x[i] - edge) >= settings.snap_distance) continue;
      auto trial = out.x;
      trial[i] = edge;
      ++out.evaluations;
      const double v = f(trial);
      if (v <= out.value) {
        out.x = trial;
        out.value = v;
      }
    }
  }
  out.trace.push_back(out.value);
  return out;
}

ScalarMinimum golden_section(const std::function<double(double)>& f, double a, double b, double tol,
                             int max_iterations) {
  if (!(b >= a)) throw DomainError("golden section needs a <= b");
  ScalarMinimum best{a, f(a), 1};
  auto consider = [&](double x, double v) {
    if (v < best.value) best = {x, v, best.evaluations};
  };
  if (b == a) return best;
  const double fb = f(b);
  ++best.evaluations;
  consider(b, fb);

  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  best.evaluations += 2;
  for (int it = 0; it < max_iterations && (b - a) > tol; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
    ++best.evaluations;
  }
  consider(c, fc);
  consider(d, fd);

  // Parabola through (c, fc), (d, fd) and the midpoint of the final bracket.
  const double m = 0.5 * (c + d);
  if (d > c) {
    const double fm = f(m);
    ++best.evaluations;
    consider(m, fm);
    const double num = (m - c) * (m - c) * (fm - fd) - (m - d) * (m - d) * (fm - fc);
    const double den = (m - c) * (fm - fd) - (m - d) * (fm - fc);
    if (den != 0.0) {
      const double x = m - 0.5 * num / den;
      if (x > a && x < b) {
        const double fx = f(x);
        ++best.evaluations;
        consider(x, fx);
      }
    }
  }
  return best;
}

}  // namespace msv

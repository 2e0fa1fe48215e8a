#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace msv {

/// Interval for one parameter. Open ends are never reached by the transform;
/// closed ends can be hit through the boundary snap.
struct Bound {
  double lo = 0.0;
  double hi = 1.0;
  bool lo_closed = false;
  bool hi_closed = true;

  [[nodiscard]] bool contains(double x) const;
};

/// Logit map between R and (lo, hi).
[[nodiscard]] double to_bounded(double u, const Bound& b);
[[nodiscard]] double to_unbounded(double x, const Bound& b);

struct NelderMeadSettings {
  double f_tol = 1e-12;        ///< absolute spread of simplex values
  double x_tol = 1e-7;         ///< simplex diameter in transformed coordinates
  int max_iterations = 600;
  int restarts = 3;            ///< extra runs from randomly perturbed starts
  std::uint64_t seed = 7;
  double initial_step = 0.5;   ///< simplex edge in transformed coordinates
  double snap_distance = 1e-3; ///< closed bounds closer than this are tried exactly
};

struct OptimizerResult {
  std::vector<double> x;
  double value = 0.0;
  int evaluations = 0;
  int iterations = 0;
  bool converged = false;
  /// Best objective after each iteration, over all runs in order.
  std::vector<double> trace;
};

/// Bounded Nelder-Mead: the simplex lives in logit coordinates, restarts draw
/// standard normal offsets around the incumbent, and a final pass snaps
/// coordinates near closed bounds onto them when that does not hurt.
[[nodiscard]] OptimizerResult minimize_bounded(const std::function<double(const std::vector<double>&)>& f,
                                               std::vector<double> x0, const std::vector<Bound>& bounds,
                                               const NelderMeadSettings& settings = {});

struct ScalarMinimum {
  double x = 0.0;
  double value = 0.0;
  int evaluations = 0;
};

/// Golden-section search on [a, b] followed by one parabolic step through the
/// final bracket; the endpoints are evaluated too, so boundary minima are found.
[[nodiscard]] ScalarMinimum golden_section(const std::function<double(double)>& f, double a, double b,
                                           double tol, int max_iterations);

}  // namespace msv

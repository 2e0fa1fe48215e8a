#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <queue>
#include <string>
#include <vector>

#include "msv/errors.hpp"

namespace msv::quad {

// Magnitude used for error control; overloaded for the accumulator types the
// pricers integrate.
inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const std::complex<double>& v) { return std::abs(v); }
template <std::size_t N>
double magnitude(const std::array<double, N>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}
template <std::size_t N>
double magnitude(const std::array<std::complex<double>, N>& v) {
  double m = 0.0;
  for (const auto& x : v) m = std::max(m, std::abs(x));
  return m;
}

template <class V>
V scaled(const V& v, double s) {
  return v * s;
}
template <class T, std::size_t N>
std::array<T, N> scaled(const std::array<T, N>& v, double s) {
  std::array<T, N> out{};
  for (std::size_t i = 0; i < N; ++i) out[i] = v[i] * s;
  return out;
}

template <class V>
V added(const V& a, const V& b) {
  return a + b;
}
template <class T, std::size_t N>
std::array<T, N> added(const std::array<T, N>& a, const std::array<T, N>& b) {
  std::array<T, N> out{};
  for (std::size_t i = 0; i < N; ++i) out[i] = a[i] + b[i];
  return out;
}

template <class V>
struct Result {
  V value{};
  double error = 0.0;
  std::size_t evaluations = 0;
};

namespace detail {

inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class V>
struct Segment {
  double a;
  double b;
  V value;
  double error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

template <class V, class F>
Segment<V> kronrod15(F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const V fc = f(center);
  V kronrod = scaled(fc, kWgk[7]);
  V gauss = scaled(fc, kWg[3]);
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const V f1 = f(center - dx);
    const V f2 = f(center + dx);
    const V pair = added(f1, f2);
    kronrod = added(kronrod, scaled(pair, kWgk[j]));
    if (j % 2 == 1) gauss = added(gauss, scaled(pair, kWg[j / 2]));
  }
  kronrod = scaled(kronrod, half);
  gauss = scaled(gauss, half);
  const double err = magnitude(added(kronrod, scaled(gauss, -1.0)));
  return {a, b, kronrod, err};
}

}  // namespace detail

/// Globally adaptive 7/15-point Gauss-Kronrod integration of f over [a, b].
///
/// Intervals with the largest error estimate are bisected until the summed
/// estimate falls below max(abs_tol, rel_tol |I|). Running out of the
/// evaluation budget throws QuadratureError carrying the achieved estimate.
template <class F>
auto integrate(F&& f, double a, double b, double abs_tol, double rel_tol,
               std::size_t max_evaluations) {
  using V = std::decay_t<decltype(f(a))>;
  Result<V> result;
  if (a == b) return result;

  std::priority_queue<detail::Segment<V>> heap;
  auto first = detail::kronrod15<V>(f, a, b);
  result.evaluations = 15;
  V total = first.value;
  double total_err = first.error;
  heap.push(first);

  while (total_err > std::max(abs_tol, rel_tol * magnitude(total))) {
    if (result.evaluations + 30 > max_evaluations) {
      throw QuadratureError("adaptive quadrature exhausted its node budget (achieved error " +
                                std::to_string(total_err) + ")",
                            total_err);
    }
    auto worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) break;  // interval at machine resolution
    heap.pop();
    auto left = detail::kronrod15<V>(f, worst.a, mid);
    auto right = detail::kronrod15<V>(f, mid, worst.b);
    result.evaluations += 30;
    total = added(total, added(added(left.value, right.value), scaled(worst.value, -1.0)));
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }

  // Re-sum to shed the drift of the incremental updates.
  V sum{};
  double err = 0.0;
  bool init = false;
  while (!heap.empty()) {
    const auto& s = heap.top();
    sum = init ? added(sum, s.value) : s.value;
    init = true;
    err += s.error;
    heap.pop();
  }
  result.value = sum;
  result.error = err;
  return result;
}

/// Integrates over consecutive breakpoints, sharing the tolerance and budget.
template <class F>
auto integrate_pieces(F&& f, const std::vector<double>& breaks, double abs_tol, double rel_tol,
                      std::size_t max_evaluations) {
  using V = std::decay_t<decltype(f(breaks.front()))>;
  Result<V> out;
  bool init = false;
  const double pieces = static_cast<double>(breaks.size() - 1);
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const std::size_t remaining =
        max_evaluations > out.evaluations ? max_evaluations - out.evaluations : 0;
    auto part = integrate(f, breaks[i], breaks[i + 1], abs_tol / pieces, rel_tol, remaining);
    out.value = init ? added(out.value, part.value) : part.value;
    init = true;
    out.error += part.error;
    out.evaluations += part.evaluations;
  }
  return out;
}

}  // namespace msv::quad

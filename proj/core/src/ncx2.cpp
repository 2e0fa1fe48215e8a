#include "msv/ncx2.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "msv/errors.hpp"

namespace msv {

void Ncx2Params::validate() const {
  if (!(dof > 0.0) || !(noncentrality >= 0.0) || !(scale > 0.0)) {
    throw DomainError("Ncx2Params: need dof > 0, noncentrality >= 0, scale > 0");
  }
}

Ncx2Params cir_transition(double z, double tau, double kappa, double theta, double sigma) {
  if (!(tau > 0.0) || !(kappa > 0.0) || !(sigma > 0.0) || !(z >= 0.0)) {
    throw DomainError("cir_transition: need tau, kappa, sigma > 0 and z >= 0");
  }
  Ncx2Params p;
  p.dof = 4.0 * kappa * theta / (sigma * sigma);
  p.scale = -std::expm1(-kappa * tau) * sigma * sigma / (4.0 * kappa);
  p.noncentrality = z * std::exp(-kappa * tau) / p.scale;
  return p;
}

double ncx2_pdf(double zeta, const Ncx2Params& params, std::size_t max_terms) {
  const double k = params.dof;
  const double lam = params.noncentrality;
  if (zeta < 0.0) return 0.0;
  if (zeta == 0.0) {
    if (k < 2.0) return std::numeric_limits<double>::infinity();
    if (k == 2.0) return 0.5 * std::exp(-0.5 * lam);
    return 0.0;
  }

  const double half_k = 0.5 * k;
  const double log_x = std::log(zeta);
  // log of the j-th mixture term: Poisson(j; lam/2) * chi2_{k+2j}(zeta)
  auto log_term = [&](double j) {
    const double poisson = lam > 0.0 ? -0.5 * lam + j * std::log(0.5 * lam) - std::lgamma(j + 1.0)
                                     : (j == 0.0 ? 0.0 : -std::numeric_limits<double>::infinity());
    const double nu2 = half_k + j;
    return poisson + (nu2 - 1.0) * log_x - 0.5 * zeta - nu2 * std::numbers::ln2 - std::lgamma(nu2);
  };
  if (lam == 0.0) return std::exp(log_term(0.0));

  // Dominant index: (j + 1)(j + k/2) = lam zeta / 4.
  const double c = 0.25 * lam * zeta;
  const double bq = 1.0 + half_k;
  double j_star = 0.5 * (-bq + std::sqrt(bq * bq - 4.0 * (half_k - c)));
  j_star = std::max(0.0, std::floor(j_star));

  const double peak_log = log_term(j_star);
  constexpr double kStop = 1e-17;
  double sum = 1.0;  // terms relative to the peak
  std::size_t used = 1;

  // term_{j+1} / term_j = c / ((j + 1)(j + k/2))
  double rel = 1.0;
  for (double j = j_star; ; j += 1.0) {
    rel *= c / ((j + 1.0) * (j + half_k));
    sum += rel;
    if (++used > max_terms) throw SeriesError("ncx2_pdf: series did not converge within budget");
    if (rel < kStop * sum && (j + 1.0) * (j + half_k) > c) break;
  }
  rel = 1.0;
  for (double j = j_star; j > 0.0; j -= 1.0) {
    rel *= (j * (j - 1.0 + half_k)) / c;
    sum += rel;
    if (++used > max_terms) throw SeriesError("ncx2_pdf: series did not converge within budget");
    if (rel < kStop * sum) break;
  }
  return std::exp(peak_log + std::log(sum));
}

}  // namespace msv

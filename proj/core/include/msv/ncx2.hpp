#pragma once

#include <cstddef>

namespace msv {

/// Non-central chi-square law of the scaled terminal CIR variance,
/// Z_T = scale * chi'^2(dof, noncentrality).
struct Ncx2Params {
  double dof = 0.0;
  double noncentrality = 0.0;
  double scale = 0.0;

  void validate() const;
};

/// Law of Z_{t+tau} given Z_t = z for dZ = kappa (theta - Z) dt + sigma sqrt(Z) dW.
[[nodiscard]] Ncx2Params cir_transition(double z, double tau, double kappa, double theta, double sigma);

/// Density of chi'^2(dof, noncentrality) at zeta, summed as a Poisson mixture of
/// central chi-square densities outward from the dominant term. Throws
/// SeriesError if the series has not converged within max_terms.
[[nodiscard]] double ncx2_pdf(double zeta, const Ncx2Params& params, std::size_t max_terms = 20000);

}  // namespace msv

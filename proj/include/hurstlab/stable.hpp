#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "hurstlab/rng.hpp"

namespace hurstlab {

using Series = std::vector<double>;
using ComplexValue = std::complex<double>;

/// Parameters of the stable law S(alpha, beta, gamma, delta).
///
/// The characteristic function is
///
///   alpha != 1: exp(-g^a |u|^a [1 + i b tan(pi a/2) sgn(u) (|g u|^(1-a) - 1)] + i d u)
///   alpha == 1: exp(-g |u| [1 + i b (2/pi) sgn(u) ln(g |u|)] + i d u)
///
/// which is continuous in alpha at alpha = 1 (Nolan's S0 form). With beta = 0
/// it coincides with every other common parameterization.
struct StableParams {
  double alpha = 2.0;
  double beta = 0.0;
  double gamma = 1.0;
  double delta = 0.0;

  /// Throws ParameterError unless 0 < alpha <= 2, |beta| <= 1, gamma > 0 and
  /// delta is finite.
  void validate() const;
};

/// Draws n i.i.d. variates by the Chambers-Mallows-Stuck transform.
/// Output is a pure function of (params, n, seed).
Series sample_stable(const StableParams& params, std::size_t n, Seed seed);

/// Same as sample_stable, drawing from an existing generator.
void sample_stable_into(const StableParams& params, Rng& rng,
                        std::span<double> out);

ComplexValue stable_cf(const StableParams& params, double u);

/// (1/n) sum exp(i u x_t). Throws EmptyInputError on an empty series.
ComplexValue empirical_cf(std::span<const double> series, double u);

}  // namespace hurstlab

#include "hurstlab/stable.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <fmt/format.h>

#include "hurstlab/error.hpp"

namespace hurstlab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kHalfPi = std::numbers::pi / 2.0;

double sign(double u) { return u > 0.0 ? 1.0 : (u < 0.0 ? -1.0 : 0.0); }

// Standard variate, alpha != 1, in the S1 parameterization
// (Weron's correction of Chambers-Mallows-Stuck).
double cms_standard(double alpha, double b_shift, double s_scale, double v,
                    double w) {
  const double av = alpha * (v + b_shift);
  const double lhs = s_scale * std::sin(av) / std::pow(std::cos(v), 1.0 / alpha);
  const double rhs =
      std::pow(std::cos(v - av) / w, (1.0 - alpha) / alpha);
  return lhs * rhs;
}

// Standard variate, alpha == 1. S1 and S0 coincide at gamma = 1.
double cms_standard_cauchy_like(double beta, double v, double w) {
  const double shifted = kHalfPi + beta * v;
  return (2.0 / kPi) *
         (shifted * std::tan(v) -
          beta * std::log((kHalfPi * w * std::cos(v)) / shifted));
}

}  // namespace

void StableParams::validate() const {
  if (!(alpha > 0.0 && alpha <= 2.0)) {
    throw ParameterError(fmt::format("stable alpha must lie in (0, 2], got {}", alpha));
  }
  if (!(beta >= -1.0 && beta <= 1.0)) {
    throw ParameterError(fmt::format("stable beta must lie in [-1, 1], got {}", beta));
  }
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw ParameterError(fmt::format("stable gamma must be positive and finite, got {}", gamma));
  }
  if (!std::isfinite(delta)) {
    throw ParameterError(fmt::format("stable delta must be finite, got {}", delta));
  }
}

void sample_stable_into(const StableParams& params, Rng& rng,
                        std::span<double> out) {
  params.validate();
  const double alpha = params.alpha;
  const double beta = params.beta;
  const double gamma = params.gamma;
  const double delta = params.delta;

  if (alpha == 2.0) {
    // 2 sqrt(W) sin(V) is N(0, 2): the generic transform at alpha = 2,
    // written without the removable cos(V) factors.
    for (double& x : out) {
      const double v = rng.open_interval(-kHalfPi, kHalfPi);
      const double w = rng.unit_exponential();
      x = delta + gamma * (2.0 * std::sqrt(w) * std::sin(v));
    }
    return;
  }

  if (alpha == 1.0) {
    // For Z ~ S1(1, beta, 1, 0), gamma Z + delta ~ S0(1, beta, gamma, delta):
    // the (2/pi) beta gamma ln(gamma) drift of S1 scaling is exactly what the
    // ln(gamma |u|) term of the continuous form absorbs.
    for (double& x : out) {
      const double v = rng.open_interval(-kHalfPi, kHalfPi);
      const double w = rng.unit_exponential();
      x = delta + gamma * cms_standard_cauchy_like(beta, v, w);
    }
    return;
  }

  // S1 -> S0 shift for alpha != 1. Expanding the continuous form gives
  //   log phi_S0 = -g^a |u|^a [1 - i b tan(pi a/2) sgn u] - i b g tan(pi a/2) u + i d u,
  // i.e. the S1 law with location d - b g tan(pi a/2). So for
  // Z ~ S1(alpha, beta, 1, 0): gamma (Z - zeta) + delta ~ S0(alpha, beta, gamma, delta).
  const double zeta = beta * std::tan(kPi * alpha / 2.0);
  const double b_shift = std::atan(zeta) / alpha;
  const double s_scale = std::pow(1.0 + zeta * zeta, 1.0 / (2.0 * alpha));
  for (double& x : out) {
    const double v = rng.open_interval(-kHalfPi, kHalfPi);
    const double w = rng.unit_exponential();
    const double z = cms_standard(alpha, b_shift, s_scale, v, w);
    x = delta + gamma * (z - zeta);
  }
}

Series sample_stable(const StableParams& params, std::size_t n, Seed seed) {
  params.validate();
  if (n == 0) {
    throw ParameterError("sample_stable needs n >= 1");
  }
  Series out(n);
  Rng rng(seed);
  sample_stable_into(params, rng, out);
  return out;
}

ComplexValue stable_cf(const StableParams& params, double u) {
  params.validate();
  const double a = params.alpha;
  const double b = params.beta;
  const double g = params.gamma;
  const double d = params.delta;
  if (u == 0.0) {
    return {1.0, 0.0};
  }
  const double abs_u = std::abs(u);
  double real_exp = 0.0;
  double imag_exp = 0.0;
  if (a == 1.0) {
    real_exp = -g * abs_u;
    imag_exp = -g * abs_u * b * (2.0 / kPi) * sign(u) * std::log(g * abs_u) + d * u;
  } else {
    // tan(pi) is not exactly zero in floating point; the skew term vanishes
    // identically at alpha = 2.
    const double tan_term = a == 2.0 ? 0.0 : std::tan(kPi * a / 2.0);
    const double scale = std::pow(g, a) * std::pow(abs_u, a);
    real_exp = -scale;
    imag_exp = -scale * b * tan_term * sign(u) *
                   (std::pow(g * abs_u, 1.0 - a) - 1.0) +
               d * u;
  }
  return std::exp(ComplexValue(real_exp, imag_exp));
}

ComplexValue empirical_cf(std::span<const double> series, double u) {
  if (series.empty()) {
    throw EmptyInputError("empirical_cf needs a nonempty series");
  }
  double re = 0.0;
  double im = 0.0;
  for (double x : series) {
    re += std::cos(u * x);
    im += std::sin(u * x);
  }
  const auto n = static_cast<double>(series.size());
  return {re / n, im / n};
}

}  // namespace hurstlab

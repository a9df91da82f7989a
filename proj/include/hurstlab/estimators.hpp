#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hurstlab/stable.hpp"

namespace hurstlab {

enum class Method { RS, DMA, MFDFA, GHE };

/// A method together with its moment order. R/S and DMA carry q = 1 by
/// convention; DFA is MFDFA with q = 2.
struct MethodSpec {
  Method method = Method::GHE;
  double q = 2.0;

  friend bool operator==(const MethodSpec&, const MethodSpec&) = default;
};

std::string_view method_name(Method m);

/// Parses `name[:q]` with name in {rs, dma, mfdfa, dfa, ghe}. Throws
/// ParameterError on unknown names or a malformed/nonpositive q.
MethodSpec parse_method(std::string_view text);

/// Inverse of parse_method: "rs", "dma", "mfdfa:1", "ghe:2", ...
std::string format_method(const MethodSpec& spec);

/// Orders by method (RS, DMA, MFDFA, GHE), then q.
bool method_less(const MethodSpec& a, const MethodSpec& b);

struct EstimatorConfig {
  int scale_base = 2;
  int min_scale = 16;
  double max_scale_fraction = 0.25;
  int dma_lambda_min = 20;
  int dma_lambda_max = 40;
  int ghe_tau_min = 1;
  int ghe_tau_max = 19;
  int detrend_order = 1;

  void validate() const;
};

struct LogLogPoint {
  double log_scale = 0.0;
  double log_fluctuation = 0.0;
};

struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::vector<LogLogPoint> points;
};

struct HurstEstimate {
  MethodSpec method;
  double hurst = 0.0;
  LogLogFit fit;
};

/// Cumulative sum of x_t, or of (x_t - mean) when subtract_mean is set.
Series build_profile(std::span<const double> increments, bool subtract_mean);

/// Powers scale_base^p (p >= 1) with min_scale <= b^p <= length * fraction.
/// Throws InsufficientScalesError when fewer than two remain.
std::vector<std::size_t> make_scale_grid(std::size_t series_length,
                                         const EstimatorConfig& config);

/// OLS of log(fluctuation) on log(scale). r_squared is 1 when the
/// fluctuations are all equal (zero total variance, zero residual).
LogLogFit loglog_fit(std::span<const std::pair<double, double>> points);

HurstEstimate estimate_rs(std::span<const double> increments,
                          const EstimatorConfig& config);

HurstEstimate estimate_mfdfa(std::span<const double> increments, double q,
                             const EstimatorConfig& config);

/// MF-DFA at q = 2.
HurstEstimate estimate_dfa(std::span<const double> increments,
                           const EstimatorConfig& config);

HurstEstimate estimate_dma(std::span<const double> increments,
                           const EstimatorConfig& config);

/// Mean of |X(t + tau) - X(t)|^q over the len - tau admissible t.
double ghe_kq(std::span<const double> levels, double q, std::size_t tau);

HurstEstimate estimate_ghe(std::span<const double> increments, double q,
                           const EstimatorConfig& config);

/// Dispatches on spec.method.
HurstEstimate estimate(std::span<const double> increments,
                       const MethodSpec& spec, const EstimatorConfig& config);

}  // namespace hurstlab

#include "hurstlab/estimators.hpp"

#include <algorithm>
#include <charconv>
#include <optional>
#include <cmath>
#include <string>

#include <fmt/format.h>

#include "hurstlab/error.hpp"

namespace hurstlab {

namespace {

void check_series(std::span<const double> x, std::string_view who) {
  if (x.size() < 2) {
    throw DomainError(fmt::format("{}: series needs at least 2 observations, got {}",
                                  who, x.size()));
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i])) {
      throw DomainError(fmt::format("{}: non-finite observation at index {}", who, i));
    }
  }
}

bool is_constant(std::span<const double> win) {
  return std::all_of(win.begin(), win.end(), [&](double v) { return v == win.front(); });
}

// |d|^q with the two common orders special-cased; pow is the hot spot of the
// Monte Carlo grid otherwise.
inline double abs_pow(double d, double q) {
  if (q == 1.0) return std::abs(d);
  if (q == 2.0) return d * d;
  return std::pow(std::abs(d), q);
}

HurstEstimate finish(MethodSpec method, std::vector<std::pair<double, double>> points,
                     double slope_divisor) {
  HurstEstimate est;
  est.method = method;
  est.fit = loglog_fit(points);
  est.hurst = est.fit.slope / slope_divisor;
  return est;
}

}  // namespace

std::string_view method_name(Method m) {
  switch (m) {
    case Method::RS: return "rs";
    case Method::DMA: return "dma";
    case Method::MFDFA: return "mfdfa";
    case Method::GHE: return "ghe";
  }
  return "?";
}

MethodSpec parse_method(std::string_view text) {
  const auto colon = text.find(':');
  const std::string_view name = text.substr(0, colon);
  std::optional<double> q;
  if (colon != std::string_view::npos) {
    const std::string_view qtext = text.substr(colon + 1);
    double value = 0.0;
    const auto [end, ec] = std::from_chars(qtext.data(), qtext.data() + qtext.size(), value);
    if (ec != std::errc{} || end != qtext.data() + qtext.size() || !(value > 0.0) ||
        !std::isfinite(value)) {
      throw ParameterError(fmt::format("bad moment order in method '{}'", text));
    }
    q = value;
  }
  if (name == "rs" || name == "dma") {
    if (q && *q != 1.0) {
      throw ParameterError(fmt::format("method '{}' takes no moment order", name));
    }
    return {name == "rs" ? Method::RS : Method::DMA, 1.0};
  }
  if (name == "dfa") {
    if (q && *q != 2.0) {
      throw ParameterError("dfa is mfdfa:2; use mfdfa:<q> for other orders");
    }
    return {Method::MFDFA, 2.0};
  }
  if (name == "mfdfa") return {Method::MFDFA, q.value_or(2.0)};
  if (name == "ghe") return {Method::GHE, q.value_or(2.0)};
  throw ParameterError(fmt::format("unknown method '{}' (expected rs, dma, mfdfa[:q], dfa, ghe[:q])", text));
}

std::string format_method(const MethodSpec& spec) {
  if (spec.method == Method::RS || spec.method == Method::DMA) {
    return std::string(method_name(spec.method));
  }
  return fmt::format("{}:{}", method_name(spec.method), spec.q);
}

bool method_less(const MethodSpec& a, const MethodSpec& b) {
  if (a.method != b.method) return a.method < b.method;
  return a.q < b.q;
}

void EstimatorConfig::validate() const {
  if (scale_base < 2) throw ParameterError(fmt::format("scale base must be >= 2, got {}", scale_base));
  if (min_scale < 2) throw ParameterError(fmt::format("min scale must be >= 2, got {}", min_scale));
  if (!(max_scale_fraction > 0.0 && max_scale_fraction <= 1.0)) {
    throw ParameterError(fmt::format("max scale fraction must lie in (0, 1], got {}", max_scale_fraction));
  }
  if (dma_lambda_min < 2 || dma_lambda_min >= dma_lambda_max) {
    throw ParameterError(fmt::format("DMA window range [{}, {}] invalid (need 2 <= min < max)",
                                     dma_lambda_min, dma_lambda_max));
  }
  if (ghe_tau_min < 1 || ghe_tau_min >= ghe_tau_max) {
    throw ParameterError(fmt::format("GHE lag range [{}, {}] invalid (need 1 <= min < max)",
                                     ghe_tau_min, ghe_tau_max));
  }
  if (detrend_order < 1) {
    throw ParameterError(fmt::format("detrend order must be >= 1, got {}", detrend_order));
  }
}

Series build_profile(std::span<const double> increments, bool subtract_mean) {
  double mean = 0.0;
  if (subtract_mean && !increments.empty()) {
    for (double x : increments) mean += x;
    mean /= static_cast<double>(increments.size());
  }
  Series out(increments.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < increments.size(); ++i) {
    acc += increments[i] - mean;
    out[i] = acc;
  }
  // Deviations sum to zero analytically; drop the rounding residue.
  if (subtract_mean && !out.empty()) out.back() = 0.0;
  return out;
}

std::vector<std::size_t> make_scale_grid(std::size_t series_length,
                                         const EstimatorConfig& config) {
  config.validate();
  const double cap = static_cast<double>(series_length) * config.max_scale_fraction;
  const auto base = static_cast<std::size_t>(config.scale_base);
  std::vector<std::size_t> scales;
  for (std::size_t s = base; static_cast<double>(s) <= cap; s *= base) {
    if (s >= static_cast<std::size_t>(config.min_scale)) scales.push_back(s);
  }
  if (scales.size() < 2) {
    throw InsufficientScalesError(fmt::format(
        "series of length {} yields {} admissible scale(s) in [{}, {}]; need at least 2",
        series_length, scales.size(), config.min_scale, cap));
  }
  return scales;
}

LogLogFit loglog_fit(std::span<const std::pair<double, double>> points) {
  if (points.size() < 2) {
    throw InsufficientScalesError(
        fmt::format("log-log fit needs at least 2 points, got {}", points.size()));
  }
  LogLogFit fit;
  fit.points.reserve(points.size());
  double mx = 0.0;
  double my = 0.0;
  for (const auto& [scale, fluct] : points) {
    if (!(scale > 0.0) || !(fluct > 0.0) || !std::isfinite(scale) || !std::isfinite(fluct)) {
      throw DomainError(fmt::format(
          "log-log fit needs positive finite coordinates, got ({}, {})", scale, fluct));
    }
    fit.points.push_back({std::log(scale), std::log(fluct)});
    mx += fit.points.back().log_scale;
    my += fit.points.back().log_fluctuation;
  }
  const auto n = static_cast<double>(points.size());
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (const auto& p : fit.points) {
    const double dx = p.log_scale - mx;
    const double dy = p.log_fluctuation - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0) {
    throw DegenerateRegressionError("log-log fit: all scales are equal");
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy == 0.0 ? 1.0 : std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0);
  return fit;
}

HurstEstimate estimate_rs(std::span<const double> x, const EstimatorConfig& config) {
  check_series(x, "R/S");
  const auto scales = make_scale_grid(x.size(), config);
  std::vector<std::pair<double, double>> points;
  points.reserve(scales.size());
  for (std::size_t s : scales) {
    const std::size_t windows = x.size() / s;
    double rs_sum = 0.0;
    std::size_t used = 0;
    for (std::size_t w = 0; w < windows; ++w) {
      const auto win = x.subspan(w * s, s);
      if (is_constant(win)) continue;
      double mean = 0.0;
      for (double v : win) mean += v;
      mean /= static_cast<double>(s);
      double acc = 0.0;
      double lo = 0.0;
      double hi = 0.0;
      double ss = 0.0;
      for (std::size_t k = 0; k < s; ++k) {
        const double dev = win[k] - mean;
        acc += dev;
        ss += dev * dev;
        if (k == 0) {
          lo = hi = acc;
        } else {
          lo = std::min(lo, acc);
          hi = std::max(hi, acc);
        }
      }
      const double sd = std::sqrt(ss / static_cast<double>(s));
      if (sd > 0.0) {
        rs_sum += (hi - lo) / sd;
        ++used;
      }
    }
    if (used == 0) {
      throw DegenerateSeriesError(
          fmt::format("R/S: every window of size {} has zero standard deviation", s));
    }
    points.emplace_back(static_cast<double>(s), rs_sum / static_cast<double>(used));
  }
  return finish({Method::RS, 1.0}, std::move(points), 1.0);
}

HurstEstimate estimate_mfdfa(std::span<const double> x, double q,
                             const EstimatorConfig& config) {
  check_series(x, "MF-DFA");
  if (!(q > 0.0) || !std::isfinite(q)) {
    throw ParameterError(fmt::format("MF-DFA: moment order must be positive, got {}", q));
  }
  if (config.detrend_order != 1) {
    throw ParameterError(fmt::format(
        "MF-DFA: only linear detrending (order 1) is supported, got {}", config.detrend_order));
  }
  const auto scales = make_scale_grid(x.size(), config);
  std::vector<std::pair<double, double>> points;
  points.reserve(scales.size());
  std::vector<double> profile;
  for (std::size_t s : scales) {
    const std::size_t windows = x.size() / s;
    const auto sd = static_cast<double>(s);
    // Abscissae 1..s: centered at (s + 1) / 2 with sum of squares s (s^2 - 1) / 12.
    const double kbar = (sd + 1.0) / 2.0;
    const double sxx = sd * (sd * sd - 1.0) / 12.0;
    profile.resize(s);
    double agg = 0.0;
    for (std::size_t w = 0; w < windows; ++w) {
      const auto win = x.subspan(w * s, s);
      // A constant window has an identically zero profile; skip the
      // arithmetic so rounding in the mean cannot fake a fluctuation.
      if (is_constant(win)) continue;
      double mean = 0.0;
      for (double v : win) mean += v;
      mean /= sd;
      double acc = 0.0;
      double ybar = 0.0;
      for (std::size_t k = 0; k < s; ++k) {
        acc += win[k] - mean;
        profile[k] = acc;
        ybar += acc;
      }
      ybar /= sd;
      double sxy = 0.0;
      for (std::size_t k = 0; k < s; ++k) {
        sxy += (static_cast<double>(k + 1) - kbar) * (profile[k] - ybar);
      }
      const double slope = sxy / sxx;
      double rss = 0.0;
      for (std::size_t k = 0; k < s; ++k) {
        const double r = profile[k] - ybar - slope * (static_cast<double>(k + 1) - kbar);
        rss += r * r;
      }
      const double f2 = rss / sd;
      agg += q == 2.0 ? f2 : std::pow(f2, q / 2.0);
    }
    agg /= static_cast<double>(windows);
    if (!(agg > 0.0)) {
      throw DegenerateSeriesError(
          fmt::format("MF-DFA: zero detrended fluctuation in every window of size {}", s));
    }
    const double fq = q == 2.0 ? std::sqrt(agg) : std::pow(agg, 1.0 / q);
    points.emplace_back(sd, fq);
  }
  return finish({Method::MFDFA, q}, std::move(points), 1.0);
}

HurstEstimate estimate_dfa(std::span<const double> x, const EstimatorConfig& config) {
  return estimate_mfdfa(x, 2.0, config);
}

HurstEstimate estimate_dma(std::span<const double> x, const EstimatorConfig& config) {
  check_series(x, "DMA");
  config.validate();
  const auto lmin = static_cast<std::size_t>(config.dma_lambda_min);
  const auto lmax = static_cast<std::size_t>(config.dma_lambda_max);
  if (x.size() <= lmax) {
    throw InsufficientScalesError(fmt::format(
        "DMA: series of length {} must exceed the largest window {}", x.size(), lmax));
  }
  // With X the plain cumulative sum, the deviation from the backward moving
  // average is a weighted sum of the last lambda - 1 increments:
  //   X(t) - (1/l) sum_{k<l} X(t-k) = (1/l) sum_{j=0}^{l-2} (l-1-j) x(t-j).
  // B is that weighted sum and A the plain sum over the same span; both are
  // advanced in O(1) and recomputed from scratch periodically to bound drift.
  constexpr std::size_t kRefresh = 512;
  const std::size_t n = x.size();
  std::vector<std::pair<double, double>> points;
  points.reserve(lmax - lmin + 1);
  for (std::size_t lambda = lmin; lambda <= lmax; ++lambda) {
    const std::size_t span = lambda - 1;
    const auto weight_top = static_cast<double>(lambda - 1);
    auto recompute = [&](std::size_t i, double& a, double& b) {
      a = 0.0;
      b = 0.0;
      for (std::size_t j = 0; j < span; ++j) {
        a += x[i - j];
        b += static_cast<double>(lambda - 1 - j) * x[i - j];
      }
    };
    double a = 0.0;
    double b = 0.0;
    double sum_sq = 0.0;
    for (std::size_t i = lambda - 1; i < n; ++i) {
      if ((i - (lambda - 1)) % kRefresh == 0) {
        recompute(i, a, b);
      } else {
        b = b - a + weight_top * x[i];
        a = a + x[i] - x[i - span];
      }
      const double dev = b / static_cast<double>(lambda);
      sum_sq += dev * dev;
    }
    const double f2 = sum_sq / static_cast<double>(n - lambda + 1);
    if (!(f2 > 0.0)) {
      throw DegenerateSeriesError(fmt::format("DMA: zero fluctuation at window {}", lambda));
    }
    points.emplace_back(static_cast<double>(lambda), f2);
  }
  return finish({Method::DMA, 1.0}, std::move(points), 2.0);
}

double ghe_kq(std::span<const double> levels, double q, std::size_t tau) {
  if (tau == 0 || tau >= levels.size()) {
    throw DomainError(fmt::format("GHE: lag {} outside [1, {})", tau, levels.size()));
  }
  if (!(q > 0.0) || !std::isfinite(q)) {
    throw ParameterError(fmt::format("GHE: moment order must be positive, got {}", q));
  }
  const std::size_t count = levels.size() - tau;
  double sum = 0.0;
  for (std::size_t t = 0; t < count; ++t) {
    sum += abs_pow(levels[t + tau] - levels[t], q);
  }
  return sum / static_cast<double>(count);
}

HurstEstimate estimate_ghe(std::span<const double> x, double q, const EstimatorConfig& config) {
  check_series(x, "GHE");
  config.validate();
  if (!(q > 0.0) || !std::isfinite(q)) {
    throw ParameterError(fmt::format("GHE: moment order must be positive, got {}", q));
  }
  const auto tmin = static_cast<std::size_t>(config.ghe_tau_min);
  const auto tmax = static_cast<std::size_t>(config.ghe_tau_max);
  if (x.size() <= tmax) {
    throw InsufficientScalesError(fmt::format(
        "GHE: series of length {} must exceed the largest lag {}", x.size(), tmax));
  }
  const Series levels = build_profile(x, false);
  std::vector<std::pair<double, double>> points;
  points.reserve(tmax - tmin + 1);
  for (std::size_t tau = tmin; tau <= tmax; ++tau) {
    const double k = ghe_kq(levels, q, tau);
    if (!(k > 0.0)) {
      throw DegenerateSeriesError(fmt::format("GHE: K_q vanishes at lag {}", tau));
    }
    points.emplace_back(static_cast<double>(tau), k);
  }
  return finish({Method::GHE, q}, std::move(points), q);
}

HurstEstimate estimate(std::span<const double> x, const MethodSpec& spec,
                       const EstimatorConfig& config) {
  switch (spec.method) {
    case Method::RS: return estimate_rs(x, config);
    case Method::DMA: return estimate_dma(x, config);
    case Method::MFDFA: return estimate_mfdfa(x, spec.q, config);
    case Method::GHE: return estimate_ghe(x, spec.q, config);
  }
  throw ParameterError("unknown method");
}

}  // namespace hurstlab

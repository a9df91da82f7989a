#include "hurstlab/mc.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "hurstlab/error.hpp"
#include "hurstlab/parallel.hpp"
#include "hurstlab/stable.hpp"

namespace hurstlab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct GridCoordinates {
  double alpha;
  int log2_length;
  std::size_t length;
};

// Shared engine of run_cell and run_grid: one task per (alpha, length,
// replication); the series is drawn once and handed to every method.
// Returns estimates[cell][replication], NaN marking a failed replication.
std::vector<std::vector<double>> simulate(const std::vector<GridCoordinates>& coords,
                                          const std::vector<MethodSpec>& methods,
                                          std::size_t replications, Seed master,
                                          const EstimatorConfig& config,
                                          const McRunOptions& options) {
  const EstimatorFn estimator =
      options.estimator ? options.estimator
                        : EstimatorFn([](std::span<const double> x, const MethodSpec& m,
                                         const EstimatorConfig& c) { return estimate(x, m, c); });
  const std::size_t n_methods = methods.size();
  std::vector<std::vector<double>> estimates(coords.size() * n_methods,
                                             std::vector<double>(replications, kNaN));
  const std::size_t total = coords.size() * replications;
  std::atomic<std::size_t> done{0};

  parallel_for(total, options.threads, [&](std::size_t task) {
    const std::size_t coord = task / replications;
    const std::size_t rep = task % replications;
    const GridCoordinates& c = coords[coord];
    const StableParams params{c.alpha, 0.0, std::numbers::sqrt2 / 2.0, 0.0};
    const Series series =
        sample_stable(params, c.length, replication_seed(master, c.alpha, c.length, rep));
    for (std::size_t m = 0; m < n_methods; ++m) {
      try {
        estimates[coord * n_methods + m][rep] = estimator(series, methods[m], config).hurst;
      } catch (const Error&) {
        // Left as NaN and counted as a failure.
      }
    }
    if (options.progress) options.progress(++done, total);
  });
  return estimates;
}

McCell summarize(const GridCoordinates& c, const MethodSpec& method,
                 const std::vector<double>& raw) {
  McCell cell;
  cell.alpha = c.alpha;
  cell.log2_length = c.log2_length;
  cell.length = c.length;
  cell.method = method;
  std::vector<double> ok;
  ok.reserve(raw.size());
  for (double h : raw) {
    if (std::isfinite(h)) ok.push_back(h);
  }
  cell.n_effective = ok.size();
  cell.n_failed = raw.size() - ok.size();
  if (ok.empty()) {
    cell.mean = cell.q025 = cell.q975 = kNaN;
    return cell;
  }
  // Sorting first makes the sum independent of completion order.
  std::sort(ok.begin(), ok.end());
  double sum = 0.0;
  for (double h : ok) sum += h;
  cell.mean = sum / static_cast<double>(ok.size());
  cell.q025 = empirical_quantile(ok, 0.025);
  cell.q975 = empirical_quantile(ok, 0.975);
  return cell;
}

int exact_log2(std::size_t length) {
  return std::has_single_bit(length) ? std::countr_zero(length) : -1;
}

}  // namespace

std::vector<MethodSpec> McConfig::table_methods() {
  return {{Method::RS, 1.0},    {Method::DMA, 1.0}, {Method::MFDFA, 1.0},
          {Method::MFDFA, 2.0}, {Method::GHE, 1.0}, {Method::GHE, 2.0}};
}

void McConfig::validate() const {
  if (alphas.empty()) throw ParameterError("Monte Carlo grid needs at least one alpha");
  for (double a : alphas) {
    if (!(a > 1.0 && a <= 2.0)) {
      throw ParameterError(fmt::format("Monte Carlo alpha must lie in (1, 2], got {}", a));
    }
  }
  if (log2_lengths.empty()) throw ParameterError("Monte Carlo grid needs at least one length");
  for (int p : log2_lengths) {
    if (p < 1 || p > 40) {
      throw ParameterError(fmt::format("log2 length {} out of range [1, 40]", p));
    }
  }
  if (replications < 1) throw ParameterError("Monte Carlo grid needs at least one replication");
  if (methods.empty()) throw ParameterError("Monte Carlo grid needs at least one method");
  estimator_config.validate();
}

const McCell* McTable::find(double alpha, int log2_length, const MethodSpec& method) const {
  for (const McCell& c : cells) {
    if (c.alpha == alpha && c.log2_length == log2_length && c.method == method) return &c;
  }
  return nullptr;
}

double empirical_quantile(std::span<const double> samples, double p) {
  if (samples.empty()) throw EmptyInputError("quantile of an empty sample");
  if (!(p >= 0.0 && p <= 1.0)) {
    throw ParameterError(fmt::format("quantile probability must lie in [0, 1], got {}", p));
  }
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double h = static_cast<double>(sorted.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

Seed replication_seed(Seed master, double alpha, std::size_t length,
                      std::size_t replication) {
  return derive_seed(master, std::bit_cast<std::uint64_t>(alpha), length, replication);
}

McCell run_cell(double alpha, std::size_t length, const MethodSpec& method,
                std::size_t replications, Seed master_seed,
                const EstimatorConfig& config, const McRunOptions& options) {
  if (!(alpha > 1.0 && alpha <= 2.0)) {
    throw ParameterError(fmt::format("Monte Carlo alpha must lie in (1, 2], got {}", alpha));
  }
  if (replications < 1) throw ParameterError("Monte Carlo cell needs at least one replication");
  if (length < 2) throw ParameterError("Monte Carlo cell needs series length >= 2");
  config.validate();
  const std::vector<GridCoordinates> coords{{alpha, exact_log2(length), length}};
  const auto estimates = simulate(coords, {method}, replications, master_seed, config, options);
  McCell cell = summarize(coords.front(), method, estimates.front());
  if (!cell.ok()) {
    throw CellFailureError(
        fmt::format("all {} replications failed for alpha={}, length={}, method={}",
                    cell.n_failed, alpha, length, format_method(method)),
        cell.n_failed);
  }
  return cell;
}

McTable run_grid(const McConfig& config, const McRunOptions& options) {
  config.validate();
  std::vector<GridCoordinates> coords;
  for (double a : config.alphas) {
    for (int p : config.log2_lengths) {
      coords.push_back({a, p, std::size_t{1} << p});
    }
  }
  const auto estimates = simulate(coords, config.methods, config.replications,
                                  config.master_seed, config.estimator_config, options);
  McTable table;
  table.cells.reserve(estimates.size());
  for (std::size_t c = 0; c < coords.size(); ++c) {
    for (std::size_t m = 0; m < config.methods.size(); ++m) {
      table.cells.push_back(
          summarize(coords[c], config.methods[m], estimates[c * config.methods.size() + m]));
    }
  }
  std::stable_sort(table.cells.begin(), table.cells.end(), [](const McCell& a, const McCell& b) {
    if (a.method != b.method) return method_less(a.method, b.method);
    if (a.log2_length != b.log2_length) return a.log2_length < b.log2_length;
    return a.alpha < b.alpha;
  });
  return table;
}

void write_mc_csv(std::ostream& out, const McTable& table) {
  out << "alpha,log2_length,method,q,mean,q025,q975,n_effective,n_failed\n";
  for (const McCell& c : table.cells) {
    fmt::print(out, "{},{},{},{},{:.6f},{:.6f},{:.6f},{},{}\n", c.alpha, c.log2_length,
               method_name(c.method.method), c.method.q, c.mean, c.q025, c.q975,
               c.n_effective, c.n_failed);
  }
}

}  // namespace hurstlab

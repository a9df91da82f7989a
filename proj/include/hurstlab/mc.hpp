#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "hurstlab/estimators.hpp"
#include "hurstlab/rng.hpp"

namespace hurstlab {

/// Monte Carlo design: every (alpha, length) pair gets `replications`
/// series drawn from S(alpha, 0, sqrt(2)/2, 0), and every method is applied
/// to each of them.
struct McConfig {
  std::vector<double> alphas{1.1, 1.2, 1.3, 1.4, 1.5, 1.6, 1.7, 1.8, 1.9, 2.0};
  std::vector<int> log2_lengths{9, 10, 11, 12, 13, 14, 15, 16};
  std::size_t replications = 1000;
  std::vector<MethodSpec> methods = table_methods();
  Seed master_seed{};
  EstimatorConfig estimator_config{};

  /// R/S, DMA, MF-DFA(1), DFA, GHE(1), GHE(2).
  static std::vector<MethodSpec> table_methods();

  void validate() const;
};

struct McCell {
  double alpha = 0.0;
  int log2_length = 0;
  std::size_t length = 0;
  MethodSpec method;
  double mean = 0.0;
  double q025 = 0.0;
  double q975 = 0.0;
  std::size_t n_effective = 0;
  std::size_t n_failed = 0;

  /// False when every replication failed; the statistics are then NaN.
  bool ok() const { return n_effective > 0; }
};

struct McTable {
  /// Sorted by (method, log2_length, alpha).
  std::vector<McCell> cells;

  const McCell* find(double alpha, int log2_length, const MethodSpec& method) const;
};

/// Pluggable estimator, mainly so tests can observe which series each
/// method receives.
using EstimatorFn = std::function<HurstEstimate(
    std::span<const double>, const MethodSpec&, const EstimatorConfig&)>;

struct McRunOptions {
  unsigned threads = 0;  // 0 = all cores
  EstimatorFn estimator;  // empty = hurstlab::estimate
  std::function<void(std::size_t done, std::size_t total)> progress;
};

/// Linear interpolation between order statistics at h = (n - 1) p.
double empirical_quantile(std::span<const double> samples, double p);

/// Seed of one replication. Depends only on the cell's alpha value, its
/// series length and the replication index, so a cell's statistics do not
/// change when the surrounding grid does.
Seed replication_seed(Seed master, double alpha, std::size_t length,
                      std::size_t replication);

/// Statistics of a single cell. Throws CellFailureError when every
/// replication fails.
McCell run_cell(double alpha, std::size_t length, const MethodSpec& method,
                std::size_t replications, Seed master_seed,
                const EstimatorConfig& config, const McRunOptions& options = {});

McTable run_grid(const McConfig& config, const McRunOptions& options = {});

/// CSV with header alpha,log2_length,method,q,mean,q025,q975,n_effective,n_failed.
void write_mc_csv(std::ostream& out, const McTable& table);

}  // namespace hurstlab

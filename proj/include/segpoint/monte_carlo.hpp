#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "segpoint/geometry.hpp"
#include "segpoint/moments.hpp"
#include "segpoint/nn_graph.hpp"
#include "segpoint/segregation_tests.hpp"

namespace segpoint {

struct McConfig {
  std::size_t replicates = 1000;
  std::uint64_t master_seed = 0;
  double alpha = 0.05;
  double critical_value_quantile = 0.95;
  /// 0 = hardware concurrency. Results do not depend on this.
  unsigned workers = 0;

  void validate() const;
};

/// Runs fn(i) for i in [begin, end) on up to `workers` threads. fn must
/// only write to per-index state.
void parallel_for(std::size_t begin, std::size_t end, unsigned workers,
                  const std::function<void(std::size_t)>& fn);

unsigned resolve_workers(unsigned requested);

/// (1 + #{sims >= observed}) / (M + 1).
double add_one_pvalue(std::span<const double> sims, double observed);

/// Inverse-ECDF quantile: the ceil(p*M)-th smallest value.
double empirical_quantile(std::vector<double> values, double p);

/// Statistics of the selected tests for one marked point set.
std::vector<double> compute_statistics(const MarkedPointSet& pts,
                                       std::span<const StatisticSelector> selectors);

/// Statistics for a labeling of fixed locations whose NN graph and moment
/// model are already known.
std::vector<double> compute_statistics(std::span<const int> labels, const NnGraph& g,
                                       const MomentModel& m,
                                       std::span<const StatisticSelector> selectors);

/// p-values against CSR independence simulated in the observed window with
/// the observed class sizes; one per selector.
std::vector<double> mc_sim_pvalue(const MarkedPointSet& observed,
                                  std::span<const StatisticSelector> selectors,
                                  const McConfig& cfg);

/// p-values against random relabeling of the observed locations.
std::vector<double> mc_rand_pvalue(const MarkedPointSet& observed,
                                   std::span<const StatisticSelector> selectors,
                                   const McConfig& cfg);

/// critical_value_quantile of each statistic over cfg.replicates CSR
/// simulations; aligned with `selectors`. Needs replicates >= 100.
std::vector<double> mc_critical_values(const std::vector<long>& sizes, const RectWindow& window,
                                       std::span<const StatisticSelector> selectors,
                                       const McConfig& cfg);

/// Substream ids.
inline constexpr std::uint64_t kStreamMcSim = 11;
inline constexpr std::uint64_t kStreamRand = 12;
inline constexpr std::uint64_t kStreamCritical = 13;

}  // namespace segpoint

#include "segpoint/monte_carlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "segpoint/error.hpp"
#include "segpoint/nnct.hpp"
#include "segpoint/patterns.hpp"
#include "segpoint/rng.hpp"

namespace segpoint {

void McConfig::validate() const {
  if (replicates < 1) throw InputError("Monte Carlo replicates must be >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("alpha must be in (0,1)");
  if (!(critical_value_quantile > 0.0 && critical_value_quantile < 1.0)) {
    throw InputError("critical value quantile must be in (0,1)");
  }
}

unsigned resolve_workers(unsigned requested) {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t begin, std::size_t end, unsigned workers,
                  const std::function<void(std::size_t)>& fn) {
  if (end <= begin) return;
  const unsigned threads =
      static_cast<unsigned>(std::min<std::size_t>(resolve_workers(workers), end - begin));
  if (threads <= 1) {
    for (std::size_t i = begin; i < end; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{begin};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    try {
      for (std::size_t i = next++; i < end; i = next++) fn(i);
    } catch (...) {
      const std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next = end;
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work);
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

double add_one_pvalue(std::span<const double> sims, double observed) {
  if (sims.empty()) throw InputError("Monte Carlo p-value needs at least one replicate");
  const auto exceed = std::count_if(sims.begin(), sims.end(),
                                    [observed](double s) { return s >= observed; });
  return (1.0 + static_cast<double>(exceed)) / (1.0 + static_cast<double>(sims.size()));
}

double empirical_quantile(std::vector<double> values, double p) {
  if (values.empty()) throw InputError("quantile of an empty sample");
  if (!(p > 0.0 && p <= 1.0)) throw InputError("quantile level must be in (0,1]");
  const auto m = values.size();
  auto rank = static_cast<std::size_t>(std::ceil(p * static_cast<double>(m) - 1e-12));
  rank = std::clamp<std::size_t>(rank, 1, m);
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(rank - 1),
                   values.end());
  return values[rank - 1];
}

std::vector<double> compute_statistics(std::span<const int> labels, const NnGraph& g,
                                       const MomentModel& m,
                                       std::span<const StatisticSelector> selectors) {
  const Nnct t = build_nnct(labels, g.nn_index, m.q);
  std::vector<double> out;
  out.reserve(selectors.size());
  for (const auto& s : selectors) out.push_back(test_statistic(t, m, s));
  return out;
}

std::vector<double> compute_statistics(const MarkedPointSet& pts,
                                       std::span<const StatisticSelector> selectors) {
  const NnGraph g = build_nn_graph(pts);
  const MomentModel m = cell_moments(pts.class_sizes(), g.Q, g.R);
  return compute_statistics(pts.labels(), g, m, selectors);
}

namespace {

std::vector<double> pvalues_from(const std::vector<double>& observed,
                                 const std::vector<std::vector<double>>& sims) {
  std::vector<double> out;
  std::vector<double> column(sims.size());
  for (std::size_t s = 0; s < observed.size(); ++s) {
    for (std::size_t r = 0; r < sims.size(); ++r) column[r] = sims[r][s];
    out.push_back(add_one_pvalue(column, observed[s]));
  }
  return out;
}

}  // namespace

std::vector<double> mc_sim_pvalue(const MarkedPointSet& observed,
                                  std::span<const StatisticSelector> selectors,
                                  const McConfig& cfg) {
  cfg.validate();
  const std::vector<double> obs = compute_statistics(observed, selectors);
  const std::vector<long> sizes(observed.class_sizes().begin(), observed.class_sizes().end());
  std::vector<std::vector<double>> sims(cfg.replicates);
  parallel_for(0, cfg.replicates, cfg.workers, [&](std::size_t r) {
    Rng rng(cfg.master_seed, kStreamMcSim, r);
    const MarkedPointSet sim = gen_csr(sizes, observed.window(), rng);
    sims[r] = compute_statistics(sim, selectors);
  });
  return pvalues_from(obs, sims);
}

std::vector<double> mc_rand_pvalue(const MarkedPointSet& observed,
                                   std::span<const StatisticSelector> selectors,
                                   const McConfig& cfg) {
  cfg.validate();
  const NnGraph g = build_nn_graph(observed);
  const MomentModel m = cell_moments(observed.class_sizes(), g.Q, g.R);
  const std::vector<double> obs = compute_statistics(observed.labels(), g, m, selectors);
  std::vector<std::vector<double>> sims(cfg.replicates);
  parallel_for(0, cfg.replicates, cfg.workers, [&](std::size_t r) {
    Rng rng(cfg.master_seed, kStreamRand, r);
    std::vector<int> labels(observed.labels().begin(), observed.labels().end());
    rng.shuffle(std::span<int>(labels));
    sims[r] = compute_statistics(labels, g, m, selectors);
  });
  return pvalues_from(obs, sims);
}

std::vector<double> mc_critical_values(const std::vector<long>& sizes, const RectWindow& window,
                                       std::span<const StatisticSelector> selectors,
                                       const McConfig& cfg) {
  cfg.validate();
  if (cfg.replicates < 100) {
    throw InputError("Monte Carlo critical values need at least 100 replicates");
  }
  std::vector<std::vector<double>> sims(cfg.replicates);
  parallel_for(0, cfg.replicates, cfg.workers, [&](std::size_t r) {
    Rng rng(cfg.master_seed, kStreamCritical, r);
    sims[r] = compute_statistics(gen_csr(sizes, window, rng), selectors);
  });
  std::vector<double> out;
  std::vector<double> column(sims.size());
  for (std::size_t s = 0; s < selectors.size(); ++s) {
    for (std::size_t r = 0; r < sims.size(); ++r) column[r] = sims[r][s];
    out.push_back(empirical_quantile(column, cfg.critical_value_quantile));
  }
  return out;
}

}  // namespace segpoint

#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "segpoint/geometry.hpp"
#include "segpoint/monte_carlo.hpp"
#include "segpoint/rng.hpp"

namespace segpoint {

/// Increasing distances t > 0 at which curves are evaluated.
struct DistanceGrid {
  std::vector<double> t;

  /// count equally spaced values in (0, max_t].
  static DistanceGrid uniform(double max_t, std::size_t count);
  /// Throws InputError unless nonempty, finite, t >= 0 and strictly increasing.
  void validate() const;
  std::size_t size() const { return t.size(); }
};

/// 512 points up to a quarter of the window's shorter side.
DistanceGrid default_grid(const RectWindow& window, std::size_t count = 512);

struct CurveWithEnvelope {
  std::vector<double> t;
  std::vector<double> estimate;
  std::vector<double> lower;
  std::vector<double> upper;
  /// Pointwise mean of the simulated curves.
  std::vector<double> sim_mean;
  std::size_t n_sim = 0;
};

/// Fraction of the circle of `radius` around `center` inside the window.
/// Exact: one minus the union of the arcs cut off by each side.
double edge_weight(const Point2& center, double radius, const RectWindow& window);

/// A/N^2 * sum_{i != j} 1(d_ij < t) / w(i, j), w = edge_weight(l_i, d_ij).
std::vector<double> ripley_k_uni(std::span<const Point2> pts, const RectWindow& window,
                                 const DistanceGrid& grid);

/// A/(n_i n_j) * sum over (k in i, l in j) of 1(d < t) times the mean of the
/// two reciprocal edge weights, so K_ij = K_ji. For i == j, self-pairs are
/// dropped and the result equals ripley_k_uni.
std::vector<double> ripley_k_biv(std::span<const Point2> a, std::span<const Point2> b,
                                 const RectWindow& window, const DistanceGrid& grid,
                                 bool same_class = false);
std::vector<double> ripley_k_biv(const MarkedPointSet& pts, int i, int j,
                                 const DistanceGrid& grid);

/// sqrt(K / pi).
std::vector<double> l_from_k(std::span<const double> k);
/// L(t) - t.
std::vector<double> l_minus_t(std::span<const double> k, const DistanceGrid& grid);

/// D(t) = K_case(t) - K_control(t); bounds are -/+ 2 standard deviations of
/// D over cfg.replicates random relabelings.
CurveWithEnvelope diggle_d(const MarkedPointSet& pts, int case_cls, int control_cls,
                           const DistanceGrid& grid, const McConfig& cfg);

struct PairCorrelation {
  std::vector<double> t;
  std::vector<double> g;
  /// False where t is below the mean nearest-neighbor distance.
  std::vector<bool> reliable;
};

/// g(t) = K'(t) / (2 pi t) with K' from a local quadratic fit under an
/// Epanechnikov kernel of half-width `bandwidth`. Grid points with t == 0
/// are dropped.
PairCorrelation pair_correlation(std::span<const double> k, const DistanceGrid& grid,
                                 double bandwidth, double mean_nn_distance = 0.0);

/// 0.15 / sqrt(n / A).
double default_pcf_bandwidth(std::size_t n, const RectWindow& window);

/// Pointwise 2.5% and 97.5% quantiles of `replicates` curves from
/// sim(rng), one substream per replicate, around `observed`.
CurveWithEnvelope envelope(const DistanceGrid& grid, std::vector<double> observed,
                           const std::function<std::vector<double>(Rng&)>& sim,
                           const McConfig& cfg);

inline constexpr std::uint64_t kStreamEnvelope = 21;
inline constexpr std::uint64_t kStreamDiggle = 22;

}  // namespace segpoint

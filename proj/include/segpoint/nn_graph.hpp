#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "segpoint/geometry.hpp"

namespace segpoint {

/// Nearest-neighbor graph of a planar point set.
///
/// Q counts ordered pairs of distinct points sharing a NN,
/// i.e. sum over points of indeg * (indeg - 1). R is twice the number of
/// unordered mutual-NN pairs. Both depend on locations only.
struct NnGraph {
  std::vector<std::size_t> nn_index;
  std::vector<double> nn_dist;
  std::vector<std::size_t> indeg;
  /// indeg_hist[k] = number of points that serve as NN exactly k times.
  std::vector<std::size_t> indeg_hist;
  std::uint64_t Q = 0;
  std::uint64_t R = 0;

  std::size_t size() const { return nn_index.size(); }
  double mean_nn_distance() const;
  /// 2 (Q_2 + 3 Q_3 + 6 Q_4 + 10 Q_5 + 15 Q_6); equals Q when max indeg <= 6.
  std::uint64_t truncated_q() const;
};

struct NnQuery {
  std::size_t index;
  double distance;
};

/// Grid-indexed construction. Ties go to the lowest index.
NnGraph build_nn_graph(std::span<const Point2> pts);
inline NnGraph build_nn_graph(const MarkedPointSet& pts) {
  return build_nn_graph(pts.points());
}

/// O(n^2) reference construction with the same tie-break.
NnGraph build_nn_graph_brute(std::span<const Point2> pts);

/// NN of a single point by exhaustive scan.
NnQuery pairwise_nn_query(std::span<const Point2> pts, std::size_t i);

/// Fills indeg, histogram, Q and R from nn_index.
void finalize_nn_graph(NnGraph& g);

}  // namespace segpoint

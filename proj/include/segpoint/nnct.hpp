#pragma once

#include <span>
#include <vector>

#include "segpoint/geometry.hpp"
#include "segpoint/nn_graph.hpp"

namespace segpoint {

/// q x q nearest neighbor contingency table. Row i counts base points of
/// class i by the class of their NN; rows sum to the class sizes.
class Nnct {
 public:
  explicit Nnct(int q);
  static Nnct from_counts(const std::vector<std::vector<long>>& counts);

  int q() const { return q_; }
  long operator()(int i, int j) const { return counts_[idx(i, j)]; }
  long& at(int i, int j) { return counts_[idx(i, j)]; }
  /// Row-major cell counts.
  std::span<const long> counts() const { return counts_; }
  std::vector<long> row_sums() const;
  std::vector<long> col_sums() const;
  long total() const;

 private:
  std::size_t idx(int i, int j) const {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(q_) +
           static_cast<std::size_t>(j);
  }
  int q_;
  std::vector<long> counts_;
};

Nnct build_nnct(const MarkedPointSet& pts, const NnGraph& g);

/// Label-level form used by the Monte Carlo loops.
Nnct build_nnct(std::span<const int> labels, std::span<const std::size_t> nn_index,
                int q);

}  // namespace segpoint

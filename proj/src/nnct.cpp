#include "segpoint/nnct.hpp"

#include <numeric>

#include "segpoint/error.hpp"

namespace segpoint {

Nnct::Nnct(int q) : q_(q) {
  if (q < 2) throw InputError("contingency table needs at least 2 classes");
  counts_.assign(static_cast<std::size_t>(q) * static_cast<std::size_t>(q), 0);
}

Nnct Nnct::from_counts(const std::vector<std::vector<long>>& counts) {
  const int q = static_cast<int>(counts.size());
  Nnct t(q);
  for (int i = 0; i < q; ++i) {
    if (counts[static_cast<std::size_t>(i)].size() != static_cast<std::size_t>(q)) {
      throw InputError("contingency table must be square");
    }
    for (int j = 0; j < q; ++j) {
      const long v = counts[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      if (v < 0) throw InputError("negative cell count");
      t.at(i, j) = v;
    }
  }
  if (t.total() < 2) throw InputError("contingency table total must be at least 2");
  return t;
}

std::vector<long> Nnct::row_sums() const {
  std::vector<long> out(static_cast<std::size_t>(q_), 0);
  for (int i = 0; i < q_; ++i)
    for (int j = 0; j < q_; ++j) out[static_cast<std::size_t>(i)] += (*this)(i, j);
  return out;
}

std::vector<long> Nnct::col_sums() const {
  std::vector<long> out(static_cast<std::size_t>(q_), 0);
  for (int i = 0; i < q_; ++i)
    for (int j = 0; j < q_; ++j) out[static_cast<std::size_t>(j)] += (*this)(i, j);
  return out;
}

long Nnct::total() const { return std::accumulate(counts_.begin(), counts_.end(), 0L); }

Nnct build_nnct(std::span<const int> labels, std::span<const std::size_t> nn_index,
                int q) {
  if (labels.size() != nn_index.size()) {
    throw InputError("NN graph and point set differ in size");
  }
  Nnct t(q);
  for (std::size_t p = 0; p < labels.size(); ++p) {
    ++t.at(labels[p], labels[nn_index[p]]);
  }
  return t;
}

Nnct build_nnct(const MarkedPointSet& pts, const NnGraph& g) {
  return build_nnct(pts.labels(), g.nn_index, pts.num_classes());
}

}  // namespace segpoint

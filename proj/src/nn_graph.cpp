#include "segpoint/nn_graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "segpoint/error.hpp"

namespace segpoint {

namespace {

void check_input(std::span<const Point2> pts) {
  if (pts.size() < 2) throw InputError("nearest neighbors need at least 2 points");
  for (const auto& p : pts) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw InputError("non-finite coordinate in point set");
    }
  }
}

// Lexicographic (squared distance, index) comparison implements the
// lowest-index tie-break.
inline bool closer(double d2, std::size_t j, double best_d2, std::size_t best_j) {
  return d2 < best_d2 || (d2 == best_d2 && j < best_j);
}

class UniformGrid {
 public:
  explicit UniformGrid(std::span<const Point2> pts) : pts_(pts) {
    const RectWindow bb = RectWindow::bounding_box(pts);
    x0_ = bb.xmin;
    y0_ = bb.ymin;
    const double w = bb.width();
    const double h = bb.height();
    const double n = static_cast<double>(pts.size());
    const double extent = std::max(w, h);
    if (extent == 0.0) {
      cell_ = 1.0;
    } else {
      // About two points per cell; degenerate (collinear) boxes fall back
      // to extent / n.
      cell_ = std::max(std::sqrt(2.0 * w * h / n), extent / n);
    }
    nx_ = static_cast<long>(std::floor(w / cell_)) + 1;
    ny_ = static_cast<long>(std::floor(h / cell_)) + 1;

    std::vector<std::size_t> cell_of(pts.size());
    start_.assign(static_cast<std::size_t>(nx_ * ny_ + 1), 0);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      cell_of[i] = static_cast<std::size_t>(cell_index(pts[i]));
      ++start_[cell_of[i] + 1];
    }
    for (std::size_t c = 1; c < start_.size(); ++c) start_[c] += start_[c - 1];
    members_.resize(pts.size());
    std::vector<std::size_t> fill(start_.begin(), start_.end() - 1);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      members_[fill[cell_of[i]]++] = i;
    }
  }

  NnQuery nearest(std::size_t i) const {
    const Point2& p = pts_[i];
    const long cx = clamp_x(p);
    const long cy = clamp_y(p);
    double best_d2 = std::numeric_limits<double>::infinity();
    std::size_t best_j = std::numeric_limits<std::size_t>::max();
    const long max_ring = std::max(nx_, ny_);
    for (long k = 0; k <= max_ring; ++k) {
      for (long gy = cy - k; gy <= cy + k; ++gy) {
        if (gy < 0 || gy >= ny_) continue;
        const bool edge_row = (gy == cy - k || gy == cy + k);
        const long step = edge_row ? 1 : 2 * k;
        for (long gx = cx - k; gx <= cx + k; gx += (step == 0 ? 1 : step)) {
          if (gx < 0 || gx >= nx_) continue;
          const auto c = static_cast<std::size_t>(gy * nx_ + gx);
          for (std::size_t m = start_[c]; m < start_[c + 1]; ++m) {
            const std::size_t j = members_[m];
            if (j == i) continue;
            const double d2 = squared_distance(p, pts_[j]);
            if (closer(d2, j, best_d2, best_j)) {
              best_d2 = d2;
              best_j = j;
            }
          }
        }
      }
      // Every point outside rings 0..k lies at least k * cell away.
      const double reach = static_cast<double>(k) * cell_ * (1.0 - 1e-9);
      if (best_j != std::numeric_limits<std::size_t>::max() &&
          std::sqrt(best_d2) < reach) {
        break;
      }
    }
    return {best_j, std::sqrt(best_d2)};
  }

 private:
  long clamp_x(const Point2& p) const {
    return std::clamp(static_cast<long>(std::floor((p.x - x0_) / cell_)), 0L, nx_ - 1);
  }
  long clamp_y(const Point2& p) const {
    return std::clamp(static_cast<long>(std::floor((p.y - y0_) / cell_)), 0L, ny_ - 1);
  }
  long cell_index(const Point2& p) const { return clamp_y(p) * nx_ + clamp_x(p); }

  std::span<const Point2> pts_;
  double x0_ = 0.0;
  double y0_ = 0.0;
  double cell_ = 1.0;
  long nx_ = 1;
  long ny_ = 1;
  std::vector<std::size_t> start_;
  std::vector<std::size_t> members_;
};

}  // namespace

double NnGraph::mean_nn_distance() const {
  if (nn_dist.empty()) return 0.0;
  double s = 0.0;
  for (double d : nn_dist) s += d;
  return s / static_cast<double>(nn_dist.size());
}

std::uint64_t NnGraph::truncated_q() const {
  static constexpr std::uint64_t kPairs[] = {0, 0, 1, 3, 6, 10, 15};
  std::uint64_t acc = 0;
  for (std::size_t k = 2; k < indeg_hist.size() && k <= 6; ++k) {
    acc += kPairs[k] * indeg_hist[k];
  }
  return 2 * acc;
}

void finalize_nn_graph(NnGraph& g) {
  const std::size_t n = g.nn_index.size();
  g.indeg.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) ++g.indeg[g.nn_index[i]];
  std::size_t max_deg = 0;
  for (auto d : g.indeg) max_deg = std::max(max_deg, d);
  g.indeg_hist.assign(max_deg + 1, 0);
  g.Q = 0;
  for (auto d : g.indeg) {
    ++g.indeg_hist[d];
    g.Q += static_cast<std::uint64_t>(d) * (d == 0 ? 0 : d - 1);
  }
  g.R = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (g.nn_index[g.nn_index[i]] == i) ++g.R;
  }
}

NnGraph build_nn_graph(std::span<const Point2> pts) {
  check_input(pts);
  const UniformGrid grid(pts);
  NnGraph g;
  g.nn_index.resize(pts.size());
  g.nn_dist.resize(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const NnQuery q = grid.nearest(i);
    g.nn_index[i] = q.index;
    g.nn_dist[i] = q.distance;
  }
  finalize_nn_graph(g);
  return g;
}

NnGraph build_nn_graph_brute(std::span<const Point2> pts) {
  check_input(pts);
  NnGraph g;
  g.nn_index.resize(pts.size());
  g.nn_dist.resize(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const NnQuery q = pairwise_nn_query(pts, i);
    g.nn_index[i] = q.index;
    g.nn_dist[i] = q.distance;
  }
  finalize_nn_graph(g);
  return g;
}

NnQuery pairwise_nn_query(std::span<const Point2> pts, std::size_t i) {
  if (pts.size() < 2) throw InputError("nearest neighbors need at least 2 points");
  if (i >= pts.size()) {
    throw InputError("point index " + std::to_string(i) + " out of range");
  }
  double best_d2 = std::numeric_limits<double>::infinity();
  std::size_t best_j = std::numeric_limits<std::size_t>::max();
  for (std::size_t j = 0; j < pts.size(); ++j) {
    if (j == i) continue;
    const double d2 = squared_distance(pts[i], pts[j]);
    if (closer(d2, j, best_d2, best_j)) {
      best_d2 = d2;
      best_j = j;
    }
  }
  return {best_j, std::sqrt(best_d2)};
}

}  // namespace segpoint

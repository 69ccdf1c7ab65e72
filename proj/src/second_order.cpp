#include "segpoint/second_order.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "segpoint/error.hpp"
#include "segpoint/rng.hpp"

namespace segpoint {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_inside(std::span<const Point2> pts, const RectWindow& window) {
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (!window.contains(pts[i])) {
      throw InputError("point " + std::to_string(i) + " (" + std::to_string(pts[i].x) + ", " +
                       std::to_string(pts[i].y) + ") lies outside the window");
    }
  }
}

// Adds `weight` to the first grid slot whose t exceeds d.
void add_pair(std::vector<double>& bucket, const DistanceGrid& grid, double d, double weight) {
  const auto k = std::upper_bound(grid.t.begin(), grid.t.end(), d) - grid.t.begin();
  if (k < static_cast<std::ptrdiff_t>(bucket.size())) bucket[static_cast<std::size_t>(k)] += weight;
}

std::vector<double> cumulate(std::vector<double> bucket, double scale) {
  double acc = 0.0;
  for (double& b : bucket) {
    acc += b;
    b = acc * scale;
  }
  return bucket;
}

double inverse_weight(const Point2& c, double d, const RectWindow& window) {
  if (d == 0.0) return 1.0;
  const double w = edge_weight(c, d, window);
  if (!(w > 0.0)) throw NumericalError("edge weight vanished; distance grid is too long");
  return 1.0 / w;
}

}  // namespace

DistanceGrid DistanceGrid::uniform(double max_t, std::size_t count) {
  if (!(max_t > 0.0) || count == 0) throw InputError("grid needs max_t > 0 and count >= 1");
  DistanceGrid g;
  g.t.reserve(count);
  for (std::size_t k = 1; k <= count; ++k) {
    g.t.push_back(max_t * static_cast<double>(k) / static_cast<double>(count));
  }
  return g;
}

void DistanceGrid::validate() const {
  if (t.empty()) throw InputError("distance grid is empty");
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (!std::isfinite(t[k]) || t[k] < 0.0) throw InputError("grid values must be finite and >= 0");
    if (k > 0 && !(t[k] > t[k - 1])) throw InputError("grid must be strictly increasing");
  }
}

DistanceGrid default_grid(const RectWindow& window, std::size_t count) {
  window.validate();
  return DistanceGrid::uniform(0.25 * window.shorter_side(), count);
}

double edge_weight(const Point2& center, double radius, const RectWindow& window) {
  if (!(radius > 0.0)) throw InputError("edge weight needs a positive radius");
  if (!window.contains(center)) throw InputError("edge weight center lies outside the window");
  // Outward normal direction and distance of each side.
  const double dist[4] = {window.xmax - center.x, window.ymax - center.y, center.x - window.xmin,
                          center.y - window.ymin};
  const double dir[4] = {0.0, 0.5 * std::numbers::pi, std::numbers::pi, 1.5 * std::numbers::pi};
  std::vector<std::pair<double, double>> arcs;
  for (int s = 0; s < 4; ++s) {
    if (dist[s] >= radius) continue;
    const double half = std::acos(dist[s] / radius);
    double lo = std::fmod(dir[s] - half + kTwoPi, kTwoPi);
    double hi = lo + 2.0 * half;
    if (hi > kTwoPi) {
      arcs.emplace_back(lo, kTwoPi);
      arcs.emplace_back(0.0, hi - kTwoPi);
    } else {
      arcs.emplace_back(lo, hi);
    }
  }
  if (arcs.empty()) return 1.0;
  std::sort(arcs.begin(), arcs.end());
  double outside = 0.0;
  double cur_lo = arcs[0].first;
  double cur_hi = arcs[0].second;
  for (std::size_t k = 1; k < arcs.size(); ++k) {
    if (arcs[k].first <= cur_hi) {
      cur_hi = std::max(cur_hi, arcs[k].second);
    } else {
      outside += cur_hi - cur_lo;
      cur_lo = arcs[k].first;
      cur_hi = arcs[k].second;
    }
  }
  outside += cur_hi - cur_lo;
  return std::clamp(1.0 - outside / kTwoPi, 0.0, 1.0);
}

std::vector<double> ripley_k_uni(std::span<const Point2> pts, const RectWindow& window,
                                 const DistanceGrid& grid) {
  if (pts.size() < 2) throw InputError("K function needs at least 2 points");
  window.validate();
  grid.validate();
  check_inside(pts, window);
  const double tmax = grid.t.back();
  std::vector<double> bucket(grid.size(), 0.0);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const double d2 = squared_distance(pts[i], pts[j]);
      if (d2 >= tmax * tmax) continue;
      const double d = std::sqrt(d2);
      add_pair(bucket, grid, d,
               inverse_weight(pts[i], d, window) + inverse_weight(pts[j], d, window));
    }
  }
  const double n = static_cast<double>(pts.size());
  return cumulate(std::move(bucket), window.area() / (n * n));
}

std::vector<double> ripley_k_biv(std::span<const Point2> a, std::span<const Point2> b,
                                 const RectWindow& window, const DistanceGrid& grid,
                                 bool same_class) {
  if (a.empty() || b.empty()) throw InputError("bivariate K needs two nonempty classes");
  if (same_class) return ripley_k_uni(a, window, grid);
  window.validate();
  grid.validate();
  check_inside(a, window);
  check_inside(b, window);
  const double tmax = grid.t.back();
  std::vector<double> bucket(grid.size(), 0.0);
  for (const auto& p : a) {
    for (const auto& r : b) {
      const double d2 = squared_distance(p, r);
      if (d2 >= tmax * tmax) continue;
      const double d = std::sqrt(d2);
      add_pair(bucket, grid, d,
               0.5 * (inverse_weight(p, d, window) + inverse_weight(r, d, window)));
    }
  }
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  return cumulate(std::move(bucket), window.area() / (na * nb));
}

std::vector<double> ripley_k_biv(const MarkedPointSet& pts, int i, int j,
                                 const DistanceGrid& grid) {
  if (i < 0 || j < 0 || i >= pts.num_classes() || j >= pts.num_classes()) {
    throw InputError("class index out of range");
  }
  const auto a = pts.class_points(i);
  if (i == j) return ripley_k_uni(a, pts.window(), grid);
  const auto b = pts.class_points(j);
  return ripley_k_biv(a, b, pts.window(), grid);
}

std::vector<double> l_from_k(std::span<const double> k) {
  std::vector<double> out;
  out.reserve(k.size());
  for (double v : k) out.push_back(std::sqrt(std::max(0.0, v) / std::numbers::pi));
  return out;
}

std::vector<double> l_minus_t(std::span<const double> k, const DistanceGrid& grid) {
  std::vector<double> out = l_from_k(k);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= grid.t[i];
  return out;
}

CurveWithEnvelope diggle_d(const MarkedPointSet& pts, int case_cls, int control_cls,
                           const DistanceGrid& grid, const McConfig& cfg) {
  cfg.validate();
  grid.validate();
  const int q = pts.num_classes();
  if (case_cls < 0 || control_cls < 0 || case_cls >= q || control_cls >= q ||
      case_cls == control_cls) {
    throw InputError("Diggle's D needs two distinct valid classes");
  }
  if (pts.class_sizes()[case_cls] < 2 || pts.class_sizes()[control_cls] < 2) {
    throw InputError("Diggle's D needs at least 2 points in each class");
  }
  auto d_curve = [&](std::span<const int> labels) {
    std::vector<Point2> a;
    std::vector<Point2> b;
    for (std::size_t k = 0; k < labels.size(); ++k) {
      if (labels[k] == case_cls) a.push_back(pts.points()[k]);
      if (labels[k] == control_cls) b.push_back(pts.points()[k]);
    }
    std::vector<double> d = ripley_k_uni(a, pts.window(), grid);
    const std::vector<double> kb = ripley_k_uni(b, pts.window(), grid);
    for (std::size_t i = 0; i < d.size(); ++i) d[i] -= kb[i];
    return d;
  };

  CurveWithEnvelope out;
  out.t = grid.t;
  out.estimate = d_curve(pts.labels());
  out.n_sim = cfg.replicates;
  std::vector<std::vector<double>> sims(cfg.replicates);
  parallel_for(0, cfg.replicates, cfg.workers, [&](std::size_t r) {
    Rng rng(cfg.master_seed, kStreamDiggle, r);
    std::vector<int> labels(pts.labels().begin(), pts.labels().end());
    rng.shuffle(std::span<int>(labels));
    sims[r] = d_curve(labels);
  });
  const auto m = static_cast<double>(cfg.replicates);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double mean = 0.0;
    for (const auto& s : sims) mean += s[i];
    mean /= m;
    double ss = 0.0;
    for (const auto& s : sims) ss += (s[i] - mean) * (s[i] - mean);
    const double sd = cfg.replicates > 1 ? std::sqrt(ss / (m - 1.0)) : 0.0;
    out.sim_mean.push_back(mean);
    out.lower.push_back(-2.0 * sd);
    out.upper.push_back(2.0 * sd);
  }
  return out;
}

PairCorrelation pair_correlation(std::span<const double> k, const DistanceGrid& grid,
                                 double bandwidth, double mean_nn_distance) {
  grid.validate();
  if (k.size() != grid.size()) throw InputError("K curve and grid differ in length");
  if (!(bandwidth > 0.0)) throw InputError("pair correlation bandwidth must be > 0");
  PairCorrelation out;
  const std::size_t n = grid.size();
  std::size_t lo = 0;
  for (std::size_t c = 0; c < n; ++c) {
    const double t0 = grid.t[c];
    if (t0 == 0.0) continue;
    while (lo < n && grid.t[lo] <= t0 - bandwidth) ++lo;
    Eigen::Matrix3d xtx = Eigen::Matrix3d::Zero();
    Eigen::Vector3d xty = Eigen::Vector3d::Zero();
    int used = 0;
    for (std::size_t i = lo; i < n && grid.t[i] < t0 + bandwidth; ++i) {
      const double u = (grid.t[i] - t0) / bandwidth;
      const double w = 0.75 * (1.0 - u * u);
      if (w <= 0.0) continue;
      const Eigen::Vector3d x(1.0, u, u * u);
      xtx += w * x * x.transpose();
      xty += w * k[i] * x;
      ++used;
    }
    if (used < 3) {
      throw NumericalError("pair correlation bandwidth " + std::to_string(bandwidth) +
                           " covers fewer than 3 grid points");
    }
    const Eigen::Vector3d beta = xtx.ldlt().solve(xty);
    const double slope = beta(1) / bandwidth;
    out.t.push_back(t0);
    out.g.push_back(slope / (kTwoPi * t0));
    out.reliable.push_back(t0 >= mean_nn_distance);
  }
  return out;
}

double default_pcf_bandwidth(std::size_t n, const RectWindow& window) {
  if (n == 0) throw InputError("bandwidth needs a nonempty pattern");
  return 0.15 / std::sqrt(static_cast<double>(n) / window.area());
}

CurveWithEnvelope envelope(const DistanceGrid& grid, std::vector<double> observed,
                           const std::function<std::vector<double>(Rng&)>& sim,
                           const McConfig& cfg) {
  cfg.validate();
  grid.validate();
  if (observed.size() != grid.size()) throw InputError("observed curve and grid differ in length");
  std::vector<std::vector<double>> sims(cfg.replicates);
  parallel_for(0, cfg.replicates, cfg.workers, [&](std::size_t r) {
    Rng rng(cfg.master_seed, kStreamEnvelope, r);
    sims[r] = sim(rng);
    if (sims[r].size() != grid.size()) throw InputError("simulated curve has the wrong length");
  });
  CurveWithEnvelope out;
  out.t = grid.t;
  out.estimate = std::move(observed);
  out.n_sim = cfg.replicates;
  std::vector<double> column(cfg.replicates);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double mean = 0.0;
    for (std::size_t r = 0; r < sims.size(); ++r) {
      column[r] = sims[r][i];
      mean += column[r];
    }
    out.sim_mean.push_back(mean / static_cast<double>(sims.size()));
    out.lower.push_back(empirical_quantile(column, 0.025));
    out.upper.push_back(empirical_quantile(column, 0.975));
  }
  return out;
}

}  // namespace segpoint

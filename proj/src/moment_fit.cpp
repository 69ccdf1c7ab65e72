#include "segpoint/moment_fit.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>

#include <Eigen/Dense>

#include "segpoint/error.hpp"
#include "segpoint/moments.hpp"
#include "segpoint/rng.hpp"

namespace segpoint {

std::map<std::vector<long>, double> exact_pattern_moment(std::span<const std::size_t> nn_index,
                                                         int q, std::array<int, 4> pattern) {
  const std::size_t n = nn_index.size();
  if (n < 2 || n > 10) throw InputError("exhaustive enumeration supports 2 <= n <= 10");
  for (int c : pattern) {
    if (c < 0 || c >= q) throw InputError("pattern class outside 0..q-1");
  }
  const auto [i, j, k, l] = pattern;
  std::vector<int> labels(n, 0);
  std::map<std::vector<long>, std::pair<double, long>> acc;
  std::vector<long> sizes(static_cast<std::size_t>(q));
  while (true) {
    std::fill(sizes.begin(), sizes.end(), 0L);
    long nij = 0;
    long nkl = 0;
    for (std::size_t p = 0; p < n; ++p) {
      const int a = labels[p];
      const int b = labels[nn_index[p]];
      ++sizes[static_cast<std::size_t>(a)];
      nij += (a == i && b == j);
      nkl += (a == k && b == l);
    }
    auto& slot = acc[sizes];
    slot.first += static_cast<double>(nij * nkl);
    ++slot.second;

    std::size_t d = 0;
    while (d < n && ++labels[d] == q) labels[d++] = 0;
    if (d == n) break;
  }
  std::map<std::vector<long>, double> out;
  for (const auto& [key, v] : acc) out[key] = v.first / static_cast<double>(v.second);
  return out;
}

const FitTerm* MomentFit::find(std::vector<int> labels) const {
  std::sort(labels.begin(), labels.end());
  for (const auto& t : terms) {
    if (t.labels == labels) return &t;
  }
  return nullptr;
}

namespace {

// Set partitions of the slots {p, nn(p), p', nn(p')} = {0,1,2,3} in which
// no part holds both 0 and 1 or both 2 and 3 (a point is never its own NN).
const std::vector<std::vector<std::vector<int>>>& slot_partitions() {
  static const std::vector<std::vector<std::vector<int>>> parts = {
      {{0}, {1}, {2}, {3}},
      {{0, 2}, {1}, {3}},
      {{1, 3}, {0}, {2}},
      {{0, 3}, {1}, {2}},
      {{1, 2}, {0}, {3}},
      {{0, 2}, {1, 3}},
      {{0, 3}, {1, 2}},
  };
  return parts;
}

std::vector<std::vector<int>> candidate_bases(std::array<int, 4> pattern) {
  std::set<std::vector<int>> bases;
  for (const auto& partition : slot_partitions()) {
    std::vector<int> labels;
    bool consistent = true;
    for (const auto& part : partition) {
      const int lab = pattern[static_cast<std::size_t>(part.front())];
      for (int s : part) consistent &= (pattern[static_cast<std::size_t>(s)] == lab);
      labels.push_back(lab);
    }
    if (!consistent) continue;
    std::sort(labels.begin(), labels.end());
    bases.insert(labels);
  }
  std::vector<std::vector<int>> out(bases.begin(), bases.end());
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& a, const auto& b) { return a.size() < b.size(); });
  return out;
}

struct Observation {
  double n, Q, R;
  std::vector<long> sizes;
  double target;
};

std::vector<Observation> observations(std::span<const NnGraph> graphs, int q,
                                      std::array<int, 4> pattern) {
  std::vector<Observation> out;
  for (const auto& g : graphs) {
    const auto moments = exact_pattern_moment(g.nn_index, q, pattern);
    for (const auto& [sizes, value] : moments) {
      out.push_back({static_cast<double>(g.size()), static_cast<double>(g.Q),
                     static_cast<double>(g.R), sizes, value});
    }
  }
  return out;
}

Eigen::RowVectorXd features(const Observation& o, const std::vector<std::vector<int>>& bases) {
  Eigen::RowVectorXd row(static_cast<Eigen::Index>(4 * bases.size()));
  for (std::size_t b = 0; b < bases.size(); ++b) {
    const double p = label_probability(o.sizes, bases[b]);
    const auto c = static_cast<Eigen::Index>(4 * b);
    row(c) = o.n * p;
    row(c + 1) = o.Q * p;
    row(c + 2) = o.R * p;
    row(c + 3) = o.n * o.n * p;
  }
  return row;
}

}  // namespace

MomentFit fit_moment_coefficients(std::array<int, 4> pattern,
                                  std::span<const NnGraph> training,
                                  std::span<const NnGraph> holdout) {
  const int q = std::max(2, *std::max_element(pattern.begin(), pattern.end()) + 2);
  const auto bases = candidate_bases(pattern);
  const auto train = observations(training, q, pattern);

  const auto cols = static_cast<Eigen::Index>(4 * bases.size());
  Eigen::MatrixXd design(static_cast<Eigen::Index>(train.size()), cols);
  Eigen::VectorXd target(static_cast<Eigen::Index>(train.size()));
  for (std::size_t r = 0; r < train.size(); ++r) {
    design.row(static_cast<Eigen::Index>(r)) = features(train[r], bases);
    target(static_cast<Eigen::Index>(r)) = train[r].target;
  }
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (qr.rank() < cols) {
    throw NumericalError("moment fit is rank deficient (" + std::to_string(qr.rank()) + " of " +
                         std::to_string(cols) + "); add configurations with new (n, Q, R)");
  }
  const Eigen::VectorXd coef = qr.solve(target);

  MomentFit fit;
  fit.pattern = pattern;
  for (std::size_t b = 0; b < bases.size(); ++b) {
    const auto c = static_cast<Eigen::Index>(4 * b);
    fit.terms.push_back({bases[b], coef(c), coef(c + 1), coef(c + 2), coef(c + 3)});
  }
  fit.train_residual = (design * coef - target).cwiseAbs().maxCoeff();
  for (const auto& o : observations(holdout, q, pattern)) {
    const double pred = features(o, bases).dot(coef);
    fit.holdout_residual = std::max(fit.holdout_residual, std::abs(pred - o.target));
  }
  if (fit.train_residual > 1e-8 || fit.holdout_residual > 1e-8) {
    throw NumericalError("moment fit residual too large");
  }
  return fit;
}

std::vector<NnGraph> default_fit_configurations(std::size_t count, std::uint64_t seed) {
  std::vector<NnGraph> out;
  std::set<std::tuple<std::size_t, std::uint64_t, std::uint64_t>> seen;
  Rng rng(seed);
  for (std::size_t attempt = 0; out.size() < count && attempt < 100000; ++attempt) {
    const std::size_t n = 4 + static_cast<std::size_t>(rng.below(5));
    std::vector<Point2> pts(n);
    for (auto& p : pts) p = {rng.uniform(), rng.uniform()};
    NnGraph g = build_nn_graph_brute(pts);
    if (seen.insert({n, g.Q, g.R}).second) out.push_back(std::move(g));
  }
  if (out.size() < count) {
    throw NumericalError("could not find enough distinct (n, Q, R) configurations");
  }
  return out;
}

}  // namespace segpoint

#pragma once

#include <array>
#include <map>
#include <span>
#include <vector>

#include "segpoint/nn_graph.hpp"

namespace segpoint {

/// Exhaustive random-labeling oracle for a small fixed NN graph: for every
/// class-size vector reachable with `q` classes, the exact mean of
/// N_ij * N_kl over all labelings with those sizes.
///
/// Cost is q^n labelings; intended for n <= 8.
std::map<std::vector<long>, double> exact_pattern_moment(std::span<const std::size_t> nn_index,
                                                         int q, std::array<int, 4> pattern);

/// One term of a fitted second moment: a label-probability basis function
/// (the multiset of labels a group of distinct points must carry) with a
/// coefficient per_n*n + per_q*Q + per_r*R + per_n2*n^2.
struct FitTerm {
  std::vector<int> labels;
  double per_n = 0.0;
  double per_q = 0.0;
  double per_r = 0.0;
  double per_n2 = 0.0;

  double coefficient(double n, double Q, double R) const {
    return per_n * n + per_q * Q + per_r * R + per_n2 * n * n;
  }
};

struct MomentFit {
  std::array<int, 4> pattern{};
  /// Sorted by number of labels (2-, 3-, then 4-point terms).
  std::vector<FitTerm> terms;
  double train_residual = 0.0;
  double holdout_residual = 0.0;

  /// Term with exactly this label multiset (sorted), or nullptr.
  const FitTerm* find(std::vector<int> labels) const;
};

/// Recovers E[N_ij N_kl] = sum_b coef_b(n,Q,R) * P(labels_b) by least
/// squares against exhaustive enumeration over the training graphs, then
/// checks the fit on the held-out graphs.
///
/// Candidate basis functions come from the ways the four slots
/// (p, nn(p), p', nn(p')) can coincide as points. Throws NumericalError if
/// the design is rank deficient or a residual exceeds 1e-8.
MomentFit fit_moment_coefficients(std::array<int, 4> pattern,
                                  std::span<const NnGraph> training,
                                  std::span<const NnGraph> holdout);

/// Small deterministic configurations with pairwise distinct (n, Q, R),
/// n in 4..8.
std::vector<NnGraph> default_fit_configurations(std::size_t count, std::uint64_t seed);

}  // namespace segpoint

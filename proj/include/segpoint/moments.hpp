#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace segpoint {

/// First and second moments of the NNCT cell counts under random labeling,
/// conditional on the NN-structure scalars Q and R.
///
/// `sigma` is indexed row-major over cells: entry (i*q + j, k*q + l) is
/// Cov[N_ij, N_kl].
struct MomentModel {
  int q = 0;
  long n = 0;
  std::uint64_t Q = 0;
  std::uint64_t R = 0;
  std::vector<long> class_sizes;
  Eigen::MatrixXd expected;
  Eigen::MatrixXd sigma;
  std::vector<std::string> warnings;
};

/// Probability that m distinct, specified points carry the given labels
/// when labels are a uniformly random arrangement of the class sizes:
/// prod_i n_i^(c_i) / n^(m), with x^(k) the falling factorial.
double label_probability(std::span<const long> class_sizes, std::span<const int> labels);

/// E[N_ij]: n_i(n_i-1)/(n-1) on the diagonal, n_i n_j/(n-1) off it.
Eigen::MatrixXd expected_counts(std::span<const long> class_sizes);

/// E[N_ij N_kl] conditional on (Q, R).
///
/// Splits the n^2 ordered (base point p, base point p') pairs by how
/// {p, nn(p)} and {p', nn(p')} overlap:
///   p = p'                              n pairs, 2 distinct points
///   p' = nn(p) and p = nn(p')           R pairs, 2 points
///   p' = nn(p) only                     n - R,   3 points
///   p = nn(p') only                     n - R,   3 points
///   nn(p) = nn(p'), p != p'             Q,       3 points
///   all four distinct                   n^2 - 3n - Q + R, 4 points
/// and weights each class by the label probability of its points.
double second_raw_moment(std::span<const long> class_sizes, std::uint64_t Q,
                         std::uint64_t R, int i, int j, int k, int l);

MomentModel cell_moments(std::span<const long> class_sizes, std::uint64_t Q,
                         std::uint64_t R);

/// Covariance of one row (or column) of the table, q x q.
Eigen::MatrixXd row_covariance(const MomentModel& m, int row);
Eigen::MatrixXd column_covariance(const MomentModel& m, int col);

}  // namespace segpoint

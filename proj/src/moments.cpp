#include "segpoint/moments.hpp"

#include <array>
#include <numeric>

#include "segpoint/error.hpp"

namespace segpoint {

namespace {

long total_of(std::span<const long> sizes) {
  long n = 0;
  for (long s : sizes) {
    if (s < 0) throw InputError("negative class size");
    n += s;
  }
  return n;
}

double falling(double x, int k) {
  double out = 1.0;
  for (int t = 0; t < k; ++t) out *= x - t;
  return out;
}

}  // namespace

double label_probability(std::span<const long> class_sizes, std::span<const int> labels) {
  const long n = total_of(class_sizes);
  const int m = static_cast<int>(labels.size());
  if (m > n) return 0.0;
  // labels has at most 4 entries; count multiplicities directly.
  std::array<int, 4> seen{};
  std::array<int, 4> mult{};
  int distinct = 0;
  for (int lab : labels) {
    int slot = 0;
    while (slot < distinct && seen[static_cast<std::size_t>(slot)] != lab) ++slot;
    if (slot == distinct) {
      seen[static_cast<std::size_t>(distinct)] = lab;
      ++distinct;
    }
    ++mult[static_cast<std::size_t>(slot)];
  }
  double num = 1.0;
  for (int s = 0; s < distinct; ++s) {
    num *= falling(static_cast<double>(
                       class_sizes[static_cast<std::size_t>(seen[static_cast<std::size_t>(s)])]),
                   mult[static_cast<std::size_t>(s)]);
  }
  return num / falling(static_cast<double>(n), m);
}

Eigen::MatrixXd expected_counts(std::span<const long> class_sizes) {
  const long n = total_of(class_sizes);
  if (n < 2) throw InputError("expected counts need n >= 2");
  const auto q = static_cast<Eigen::Index>(class_sizes.size());
  Eigen::MatrixXd e(q, q);
  const double denom = static_cast<double>(n - 1);
  for (Eigen::Index i = 0; i < q; ++i) {
    const double ni = static_cast<double>(class_sizes[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = 0; j < q; ++j) {
      const double nj = static_cast<double>(class_sizes[static_cast<std::size_t>(j)]);
      e(i, j) = (i == j) ? ni * (ni - 1.0) / denom : ni * nj / denom;
    }
  }
  return e;
}

double second_raw_moment(std::span<const long> sizes, std::uint64_t Q, std::uint64_t R,
                         int i, int j, int k, int l) {
  const double n = static_cast<double>(total_of(sizes));
  const double q_d = static_cast<double>(Q);
  const double r_d = static_cast<double>(R);
  auto term = [&](double weight, std::initializer_list<int> labs) {
    if (weight == 0.0) return 0.0;
    return weight * label_probability(sizes, std::span<const int>(labs.begin(), labs.size()));
  };
  double m = 0.0;
  if (i == k && j == l) m += term(n, {i, j});
  if (k == j && l == i) m += term(r_d, {i, j});
  if (k == j) m += term(n - r_d, {i, j, l});
  if (l == i) m += term(n - r_d, {k, i, j});
  if (j == l) m += term(q_d, {i, k, j});
  m += term(n * n - 3.0 * n - q_d + r_d, {i, j, k, l});
  return m;
}

MomentModel cell_moments(std::span<const long> class_sizes, std::uint64_t Q,
                         std::uint64_t R) {
  const int q = static_cast<int>(class_sizes.size());
  if (q < 2) throw InputError("moments need at least 2 classes");
  MomentModel mm;
  mm.q = q;
  mm.n = total_of(class_sizes);
  mm.Q = Q;
  mm.R = R;
  mm.class_sizes.assign(class_sizes.begin(), class_sizes.end());
  if (R > static_cast<std::uint64_t>(mm.n) || R % 2 != 0) {
    throw InputError("R must be even and at most n");
  }
  if (Q % 2 != 0) throw InputError("Q must be even");
  mm.expected = expected_counts(class_sizes);

  const auto cells = static_cast<Eigen::Index>(q) * q;
  mm.sigma.resize(cells, cells);
  for (int i = 0; i < q; ++i) {
    for (int j = 0; j < q; ++j) {
      const Eigen::Index a = i * q + j;
      for (int k = 0; k < q; ++k) {
        for (int l = 0; l < q; ++l) {
          const Eigen::Index b = k * q + l;
          if (b < a) continue;
          const double v = second_raw_moment(class_sizes, Q, R, i, j, k, l) -
                           mm.expected(i, j) * mm.expected(k, l);
          mm.sigma(a, b) = v;
          mm.sigma(b, a) = v;
        }
      }
    }
  }
  for (int c = 0; c < q; ++c) {
    if (class_sizes[static_cast<std::size_t>(c)] <= 1) {
      mm.warnings.push_back("class " + std::to_string(c + 1) + " has size " +
                            std::to_string(class_sizes[static_cast<std::size_t>(c)]) +
                            "; covariance rank falls below q(q-1)");
    }
  }
  return mm;
}

Eigen::MatrixXd row_covariance(const MomentModel& m, int row) {
  const Eigen::Index q = m.q;
  return m.sigma.block(row * q, row * q, q, q);
}

Eigen::MatrixXd column_covariance(const MomentModel& m, int col) {
  const Eigen::Index q = m.q;
  Eigen::MatrixXd out(q, q);
  for (Eigen::Index a = 0; a < q; ++a)
    for (Eigen::Index b = 0; b < q; ++b) out(a, b) = m.sigma(a * q + col, b * q + col);
  return out;
}

}  // namespace segpoint

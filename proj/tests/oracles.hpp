#pragma once

// Slow, obviously-correct reference computations used only by tests.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "segpoint/geometry.hpp"

namespace oracle {

using segpoint::Point2;

// argmin_j != i of squared distance, lowest index on ties.
inline std::vector<std::size_t> brute_nn(const std::vector<Point2>& pts) {
  std::vector<std::size_t> nn(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    double best = INFINITY;
    for (std::size_t j = 0; j < pts.size(); ++j) {
      if (j == i) continue;
      const double dx = pts[i].x - pts[j].x;
      const double dy = pts[i].y - pts[j].y;
      const double d = dx * dx + dy * dy;
      if (d < best) {
        best = d;
        nn[i] = j;
      }
    }
  }
  return nn;
}

inline long shared_nn_pairs(const std::vector<std::size_t>& nn) {
  long q = 0;
  for (std::size_t a = 0; a < nn.size(); ++a)
    for (std::size_t b = 0; b < nn.size(); ++b)
      if (a != b && nn[a] == nn[b]) ++q;
  return q;
}

inline long reflexive_points(const std::vector<std::size_t>& nn) {
  long r = 0;
  for (std::size_t a = 0; a < nn.size(); ++a)
    if (nn[nn[a]] == a) ++r;
  return r;
}

// Exact mean and covariance of the NNCT cells over every distinct
// arrangement of the class labels on the fixed graph.
struct EnumMoments {
  int q = 0;
  std::vector<double> mean;  // q*q
  std::vector<double> cov;   // (q*q)^2, row-major over cells
  long arrangements = 0;
};

inline EnumMoments enumerate_moments(const std::vector<std::size_t>& nn,
                                     const std::vector<long>& sizes) {
  const int q = static_cast<int>(sizes.size());
  const int cells = q * q;
  std::vector<int> labels;
  for (int c = 0; c < q; ++c) labels.insert(labels.end(), static_cast<std::size_t>(sizes[c]), c);
  std::sort(labels.begin(), labels.end());
  std::vector<double> s1(static_cast<std::size_t>(cells), 0.0);
  std::vector<double> s2(static_cast<std::size_t>(cells * cells), 0.0);
  long count = 0;
  std::vector<double> n(static_cast<std::size_t>(cells));
  do {
    std::fill(n.begin(), n.end(), 0.0);
    for (std::size_t p = 0; p < nn.size(); ++p) n[static_cast<std::size_t>(labels[p] * q + labels[nn[p]])] += 1.0;
    for (int a = 0; a < cells; ++a) {
      s1[static_cast<std::size_t>(a)] += n[static_cast<std::size_t>(a)];
      for (int b = 0; b < cells; ++b) s2[static_cast<std::size_t>(a * cells + b)] += n[static_cast<std::size_t>(a)] * n[static_cast<std::size_t>(b)];
    }
    ++count;
  } while (std::next_permutation(labels.begin(), labels.end()));
  EnumMoments m;
  m.q = q;
  m.arrangements = count;
  m.mean.resize(static_cast<std::size_t>(cells));
  m.cov.resize(static_cast<std::size_t>(cells * cells));
  for (int a = 0; a < cells; ++a) m.mean[static_cast<std::size_t>(a)] = s1[static_cast<std::size_t>(a)] / static_cast<double>(count);
  for (int a = 0; a < cells; ++a)
    for (int b = 0; b < cells; ++b)
      m.cov[static_cast<std::size_t>(a * cells + b)] =
          s2[static_cast<std::size_t>(a * cells + b)] / static_cast<double>(count) -
          m.mean[static_cast<std::size_t>(a)] * m.mean[static_cast<std::size_t>(b)];
  return m;
}

// Falling-factorial label probabilities written out by hand.
inline double ff(double x, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= x - i;
  return r;
}

// Var[N_ii] = (n+R)p_ii + (2n-2R+Q)p_iii + (n^2-3n-Q+R)p_iiii - E^2
inline double var_nii(double ni, double n, double Q, double R) {
  const double e = ni * (ni - 1) / (n - 1);
  return (n + R) * ff(ni, 2) / ff(n, 2) + (2 * n - 2 * R + Q) * ff(ni, 3) / ff(n, 3) +
         (n * n - 3 * n - Q + R) * ff(ni, 4) / ff(n, 4) - e * e;
}

// Var[N_ij] = n p_ij + Q p_iij + (n^2-3n-Q+R) p_iijj - E^2, i != j
inline double var_nij(double ni, double nj, double n, double Q, double R) {
  const double e = ni * nj / (n - 1);
  return n * ni * nj / ff(n, 2) + Q * ff(ni, 2) * nj / ff(n, 3) +
         (n * n - 3 * n - Q + R) * ff(ni, 2) * ff(nj, 2) / ff(n, 4) - e * e;
}

// Fraction of the circle inside the window by dense angular sampling.
inline double sampled_edge_weight(const Point2& c, double r, const segpoint::RectWindow& w,
                                  int samples = 200000) {
  int inside = 0;
  for (int k = 0; k < samples; ++k) {
    const double th = 2.0 * std::numbers::pi * (k + 0.5) / samples;
    const Point2 p{c.x + r * std::cos(th), c.y + r * std::sin(th)};
    if (p.x >= w.xmin && p.x <= w.xmax && p.y >= w.ymin && p.y <= w.ymax) ++inside;
  }
  return static_cast<double>(inside) / samples;
}

}  // namespace oracle

#include "segpoint/segregation_tests.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "segpoint/error.hpp"

namespace segpoint {

namespace {

void check_consistent(const Nnct& t, const MomentModel& m) {
  if (t.q() != m.q) throw InputError("table and moment model differ in class count");
  const auto rows = t.row_sums();
  for (int i = 0; i < t.q(); ++i) {
    if (rows[static_cast<std::size_t>(i)] != m.class_sizes[static_cast<std::size_t>(i)]) {
      throw InputError("table row sums do not match the moment model's class sizes");
    }
  }
}

void check_class(int c, int q) {
  if (c < 0 || c >= q) {
    throw InputError("class index " + std::to_string(c) + " outside 0.." +
                     std::to_string(q - 1));
  }
}

Eigen::VectorXd deviation(const Nnct& t, const MomentModel& m) {
  const int q = t.q();
  Eigen::VectorXd d(q * q);
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j)
      d(i * q + j) = static_cast<double>(t(i, j)) - m.expected(i, j);
  return d;
}

// Relative tolerance below which a negative eigenvalue counts as rounding.
constexpr double kPsdTol = 1e-8;

double quadratic_form(const Eigen::VectorXd& d, const Eigen::MatrixXd& cov,
                      int expected_rank, std::vector<std::string>& warnings,
                      const char* what) {
  const PseudoInverse pinv = pseudo_inverse(cov);
  if (pinv.min_eigenvalue < -kPsdTol * std::max(1.0, pinv.max_eigenvalue)) {
    throw NumericalError(std::string(what) +
                         ": covariance matrix is not positive semidefinite");
  }
  if (pinv.rank != expected_rank) {
    warnings.push_back(std::string(what) + ": covariance rank " + std::to_string(pinv.rank) +
                       ", expected " + std::to_string(expected_rank) +
                       "; using the generalized inverse");
  }
  const double v = d.dot(pinv.inverse * d);
  return std::max(0.0, v);
}

TestReport finish(StatisticSelector which, double stat, int df,
                  std::vector<std::string> warnings) {
  TestReport r;
  r.which = which;
  r.statistic = stat;
  r.df = df;
  r.p_asy = chisq_sf(stat, df);
  r.warnings = std::move(warnings);
  return r;
}

}  // namespace

std::string StatisticSelector::name() const {
  switch (kind) {
    case TestKind::overall:
      return "overall";
    case TestKind::base:
      return "base" + std::to_string(cls + 1);
    case TestKind::nn:
      return "nn" + std::to_string(cls + 1);
  }
  return "?";
}

StatisticSelector StatisticSelector::parse(const std::string& s) {
  if (s == "overall") return {TestKind::overall, 0};
  auto number = [&](std::size_t prefix) {
    std::string rest = s.substr(prefix);
    if (!rest.empty() && rest[0] == ':') rest.erase(0, 1);
    if (rest.empty() || rest.find_first_not_of("0123456789") != std::string::npos) {
      throw InputError("bad test selector '" + s + "'");
    }
    const int k = std::stoi(rest);
    if (k < 1) throw InputError("class numbers in selectors start at 1: '" + s + "'");
    return k - 1;
  };
  if (s.rfind("base", 0) == 0) return {TestKind::base, number(4)};
  if (s.rfind("nn", 0) == 0) return {TestKind::nn, number(2)};
  throw InputError("bad test selector '" + s + "' (expected overall, baseK or nnK, e.g. base1 or nn:2)");
}

std::vector<StatisticSelector> all_selectors(int q) {
  std::vector<StatisticSelector> out{{TestKind::overall, 0}};
  for (int i = 0; i < q; ++i) out.push_back({TestKind::base, i});
  for (int j = 0; j < q; ++j) out.push_back({TestKind::nn, j});
  return out;
}

int degrees_of_freedom(const StatisticSelector& s, int q) {
  switch (s.kind) {
    case TestKind::overall:
      return q * (q - 1);
    case TestKind::base:
      return q - 1;
    case TestKind::nn:
      return q;
  }
  return 0;
}

double chisq_sf(double x, int df) {
  if (df < 1) throw InputError("chi-square degrees of freedom must be >= 1");
  if (std::isnan(x)) throw InputError("chi-square statistic is NaN");
  if (x <= 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  return boost::math::gamma_q(0.5 * df, 0.5 * x);
}

double chisq_quantile(double p, int df) {
  if (df < 1) throw InputError("chi-square degrees of freedom must be >= 1");
  if (!(p > 0.0 && p < 1.0)) throw InputError("quantile level must be in (0,1)");
  const boost::math::chi_squared dist(df);
  return boost::math::quantile(dist, p);
}

PseudoInverse pseudo_inverse(const Eigen::MatrixXd& sym, double rel_tol) {
  if (sym.rows() != sym.cols()) throw InputError("pseudo-inverse needs a square matrix");
  const double scale = std::max(1.0, sym.cwiseAbs().maxCoeff());
  if ((sym - sym.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale) {
    throw InputError("pseudo-inverse input is not symmetric");
  }
  PseudoInverse out;
  out.inverse = Eigen::MatrixXd::Zero(sym.rows(), sym.cols());
  if (sym.size() == 0) return out;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  if (es.info() != Eigen::Success) throw NumericalError("eigendecomposition failed");
  const Eigen::VectorXd& ev = es.eigenvalues();
  out.min_eigenvalue = ev.minCoeff();
  out.max_eigenvalue = ev.maxCoeff();
  const double cutoff = rel_tol * ev.cwiseAbs().maxCoeff();
  Eigen::VectorXd inv_ev = Eigen::VectorXd::Zero(ev.size());
  for (Eigen::Index k = 0; k < ev.size(); ++k) {
    if (std::abs(ev(k)) > cutoff) {
      inv_ev(k) = 1.0 / ev(k);
      ++out.rank;
    }
  }
  const Eigen::MatrixXd& v = es.eigenvectors();
  out.inverse = v * inv_ev.asDiagonal() * v.transpose();
  return out;
}

TestReport dixon_overall(const Nnct& t, const MomentModel& m) {
  check_consistent(t, m);
  std::vector<std::string> warnings = m.warnings;
  const int q = t.q();
  const double c = quadratic_form(deviation(t, m), m.sigma, q * (q - 1), warnings, "overall");
  return finish({TestKind::overall, 0}, c, q * (q - 1), std::move(warnings));
}

TestReport base_class_specific(const Nnct& t, const MomentModel& m, int i) {
  check_consistent(t, m);
  const int q = t.q();
  check_class(i, q);
  if (m.class_sizes[static_cast<std::size_t>(i)] <= 1) {
    throw DegenerateClassError("base-class test undefined for class " + std::to_string(i + 1) +
                               " with " +
                               std::to_string(m.class_sizes[static_cast<std::size_t>(i)]) +
                               " point(s)");
  }
  const Eigen::VectorXd d = deviation(t, m).segment(i * q, q);
  std::vector<std::string> warnings;
  const double c = quadratic_form(d, row_covariance(m, i), q - 1, warnings, "base");
  return finish({TestKind::base, i}, c, q - 1, std::move(warnings));
}

TestReport nn_class_specific(const Nnct& t, const MomentModel& m, int j) {
  check_consistent(t, m);
  const int q = t.q();
  check_class(j, q);
  const Eigen::VectorXd full = deviation(t, m);
  Eigen::VectorXd d(q);
  for (int i = 0; i < q; ++i) d(i) = full(i * q + j);
  std::vector<std::string> warnings;
  const double c = quadratic_form(d, column_covariance(m, j), q, warnings, "nn");
  return finish({TestKind::nn, j}, c, q, std::move(warnings));
}

double two_class_overall_closed_form(const Nnct& t, const MomentModel& m) {
  check_consistent(t, m);
  if (t.q() != 2) throw InputError("closed-form overall statistic is for two classes");
  const double var11 = m.sigma(0, 0);
  const double var22 = m.sigma(3, 3);
  const double cov = m.sigma(0, 3);
  if (!(var11 > 0.0) || !(var22 > 0.0)) {
    throw NumericalError("closed-form overall statistic: zero diagonal variance");
  }
  const double z11 = (static_cast<double>(t(0, 0)) - m.expected(0, 0)) / std::sqrt(var11);
  const double z22 = (static_cast<double>(t(1, 1)) - m.expected(1, 1)) / std::sqrt(var22);
  const double r = cov / std::sqrt(var11 * var22);
  if (std::abs(1.0 - r * r) < 1e-12) {
    throw NumericalError("closed-form overall statistic: |r| = 1");
  }
  return (z11 * z11 + z22 * z22 - 2.0 * r * z11 * z22) / (1.0 - r * r);
}

TestReport run_test(const Nnct& t, const MomentModel& m, const StatisticSelector& s) {
  switch (s.kind) {
    case TestKind::overall:
      return dixon_overall(t, m);
    case TestKind::base:
      return base_class_specific(t, m, s.cls);
    case TestKind::nn:
      return nn_class_specific(t, m, s.cls);
  }
  throw InputError("unknown test kind");
}

double test_statistic(const Nnct& t, const MomentModel& m, const StatisticSelector& s) {
  return run_test(t, m, s).statistic;
}

std::vector<TestReport> run_all_tests(const Nnct& t, const MomentModel& m) {
  std::vector<TestReport> out;
  for (const auto& s : all_selectors(t.q())) {
    if (s.kind == TestKind::base && m.class_sizes[static_cast<std::size_t>(s.cls)] <= 1) {
      continue;
    }
    out.push_back(run_test(t, m, s));
  }
  return out;
}

}  // namespace segpoint

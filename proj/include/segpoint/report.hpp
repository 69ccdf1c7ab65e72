#pragma once

#include <optional>
#include <string>
#include <vector>

#include "segpoint/geometry.hpp"
#include "segpoint/io.hpp"
#include "segpoint/monte_carlo.hpp"
#include "segpoint/nnct.hpp"
#include "segpoint/segregation_tests.hpp"

namespace segpoint {

enum class OutputFormat { text, csv, json };
OutputFormat parse_output_format(const std::string& s);

/// Either a point set or a raw table. Monte Carlo p-values need points.
struct AnalysisRequest {
  std::optional<MarkedPointSet> points;
  std::optional<NnctFile> nnct;
  /// Empty: every test (base tests of classes with n_i <= 1 are skipped).
  std::vector<StatisticSelector> tests;
  std::optional<McConfig> mc;
  bool percentages = false;
};

struct AnalysisReport {
  std::vector<std::string> names;
  Nnct table{2};
  std::uint64_t Q = 0;
  std::uint64_t R = 0;
  std::vector<TestReport> tests;
  std::optional<std::size_t> mc_replicates;
  std::optional<std::uint64_t> seed;
  std::string input_hash;
  bool percentages = false;
  std::vector<std::string> warnings;
};

AnalysisReport analyze(const AnalysisRequest& req);

/// 2 decimals.
std::string format_statistic(double x);
/// 4 decimals without the leading zero, "<.0001" below 1e-4.
std::string format_pvalue(double p);

/// Row and column percentage tables; each row (column) sums to 100.
std::vector<std::vector<double>> row_percentages(const Nnct& t);
std::vector<std::vector<double>> column_percentages(const Nnct& t);

/// Human label for a test, e.g. "base W.T.".
std::string test_label(const StatisticSelector& s, const std::vector<std::string>& names);

std::string format_report(const AnalysisReport& r, OutputFormat fmt);

}  // namespace segpoint

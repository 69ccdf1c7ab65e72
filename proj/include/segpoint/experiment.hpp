#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "segpoint/geometry.hpp"
#include "segpoint/monte_carlo.hpp"
#include "segpoint/segregation_tests.hpp"

namespace segpoint {

enum class CriticalSource { asymptotic, monte_carlo };
std::string to_string(CriticalSource s);

struct TestRate {
  StatisticSelector which;
  long rejections = 0;
  double rate = 0.0;
  double se = 0.0;
  /// "c" (significantly below alpha), "l" (above), or "" ; size runs only.
  std::string flag;
};

/// One line of a size or power table.
struct SizePowerRow {
  std::string scenario;
  std::vector<long> sizes;
  CriticalSource source = CriticalSource::asymptotic;
  std::size_t replicates = 0;
  std::vector<TestRate> rates;

  const TestRate& rate(const StatisticSelector& s) const;
};

/// Two-sided normal test of rate against alpha with SE sqrt(alpha(1-alpha)/M)
/// at level 0.05: "c", "l" or "".
std::string size_flag(double rate, double alpha, std::size_t replicates);

/// Empirical size of every test at the asymptotic critical values under a
/// null scenario ("csr" or "rl:K").
std::vector<SizePowerRow> run_size_experiment(const std::string& scenario,
                                              const std::vector<std::vector<long>>& sizes,
                                              const RectWindow& window, const McConfig& cfg);

/// Empirical power under an alternative scenario. Monte Carlo critical
/// values come from `cv_replicates` CSR simulations at matching sizes.
std::vector<SizePowerRow> run_power_experiment(const std::string& scenario,
                                               const std::vector<std::vector<long>>& sizes,
                                               const RectWindow& window, const McConfig& cfg,
                                               CriticalSource source,
                                               std::size_t cv_replicates = 0);

/// Experiment description read from a flat `key = value` file. Values use
/// JSON syntax (strings quoted, arrays in brackets); `#` starts a comment;
/// an array may continue over several lines.
struct ExperimentConfig {
  std::string name = "experiment";
  std::string mode = "size";  // size | power
  std::vector<std::string> scenarios;
  std::vector<std::vector<long>> sizes;
  RectWindow window = RectWindow::unit();
  std::size_t replicates = 1000;
  std::size_t full_replicates = 10000;
  std::uint64_t seed = 1;
  double alpha = 0.05;
  std::string critical = "asymptotic";  // asymptotic | monte-carlo | both
  std::size_t cv_replicates = 0;        // 0 = same as replicates
  double cv_quantile = 0.95;
  bool regenerate_locations = false;
  std::size_t block = 1000;

  /// Throws InputError with the offending field path.
  void validate() const;
  std::vector<CriticalSource> sources() const;
  /// Canonical JSON of every field that affects results.
  std::string canonical() const;
  /// FNV-1a 64 of canonical(), hex.
  std::string spec_hash() const;
};

ExperimentConfig parse_experiment_config(const std::string& text);
ExperimentConfig load_experiment_config(const std::string& path);

/// Names of the bundled presets and their config text.
std::vector<std::string> preset_names();
std::string preset_config(const std::string& name);

struct RunOptions {
  unsigned workers = 0;
  bool resume = false;
  /// Stop (incomplete) after this many replicate blocks; for tests.
  std::optional<std::size_t> stop_after_blocks;
  std::ostream* progress = nullptr;
};

struct RunResult {
  bool complete = false;
  std::vector<SizePowerRow> rows;
};

/// Runs every (scenario, sizes) item, streaming CSV rows to `csv_path` and
/// per-block checkpoints to `csv_path + ".ckpt"`. With resume, completed
/// rows and the last checkpoint are reused; the final file is identical to
/// an uninterrupted run.
RunResult run_experiment(const ExperimentConfig& cfg, const std::string& csv_path,
                         const RunOptions& opts);

/// Column header and one line per row, as written to the CSV.
std::string csv_header(int q);
std::string csv_row(const SizePowerRow& row);

/// Text table, rates to 4 decimals with c/l marks.
void print_rows_table(std::ostream& os, const std::vector<SizePowerRow>& rows);

inline constexpr const char* kVersion = "0.1.0";

}  // namespace segpoint

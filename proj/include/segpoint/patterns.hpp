#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "segpoint/geometry.hpp"
#include "segpoint/rng.hpp"

namespace segpoint {

enum class PatternKind { csr, rl_case, segregation2, segregation3, association2, association3 };

/// Everything needed to draw one null or alternative pattern.
///
/// Scenario strings (the config-file form):
///   csr            CSR independence in `window`
///   rl:K           random labeling of RL layout K (two classes: 1-3,
///                  three classes: 1-2)
///   seg:S          shifted-square segregation (2 or 3 classes by sizes)
///   assoc:R        radial-offset association, two classes
///   assoc:RY,RZ    radial-offset association, three classes
/// Numbers may be written as fractions, e.g. seg:1/6.
struct PatternSpec {
  PatternKind kind = PatternKind::csr;
  std::vector<long> class_sizes;
  RectWindow window = RectWindow::unit();
  std::uint64_t seed = 0;
  int rl_case = 1;
  double s = 0.0;
  double r = 0.0;
  double r_y = 0.0;
  double r_z = 0.0;
  /// RL only: draw fresh locations for every replicate instead of once.
  bool regenerate_locations = false;

  /// Throws InputError on out-of-range parameters.
  void validate() const;
  int num_classes() const { return static_cast<int>(class_sizes.size()); }

  static PatternSpec from_scenario(const std::string& scenario, std::vector<long> sizes,
                                   RectWindow window, std::uint64_t seed);
  std::string scenario() const;
};

/// Parses "0.25", "1/6", "-2", ...
double parse_number(const std::string& text);

/// CSR independence: each class iid uniform on the window.
MarkedPointSet gen_csr(const std::vector<long>& sizes, const RectWindow& window, Rng& rng);

/// Fixed locations for an RL layout, labeled in class order.
MarkedPointSet gen_rl_layout(int rl_case, const std::vector<long>& sizes, Rng& rng);

/// Labels drawn without replacement for the given sizes, over n points.
std::vector<int> random_labels(const std::vector<long>& sizes, Rng& rng);

/// Same locations, labels permuted uniformly at random.
MarkedPointSet relabel(const MarkedPointSet& pts, Rng& rng);

MarkedPointSet gen_segregation(const PatternSpec& spec, Rng& rng);
MarkedPointSet gen_association(const PatternSpec& spec, Rng& rng);

/// Pattern for replicate `replicate` of `spec`, seeded from
/// (spec.seed, replicate). For RL with fixed locations, the layout comes
/// from substream 0 of the layout stream and only the labels vary.
MarkedPointSet generate(const PatternSpec& spec, std::uint64_t replicate);

/// Substream ids used by generate().
inline constexpr std::uint64_t kStreamPattern = 1;
inline constexpr std::uint64_t kStreamLayout = 2;

}  // namespace segpoint

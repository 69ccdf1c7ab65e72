#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "segpoint/geometry.hpp"
#include "segpoint/nnct.hpp"
#include "segpoint/second_order.hpp"

namespace segpoint {

/// Reads a CSV with header `x,y,label` (columns in any order, extra columns
/// ignored). Labels are numbered in order of first appearance. Without an
/// explicit window the bounding box is used and a warning is appended.
MarkedPointSet load_points_csv(const std::string& path,
                               std::optional<RectWindow> window = std::nullopt,
                               std::vector<std::string>* warnings = nullptr);
MarkedPointSet parse_points_csv(const std::string& text,
                                std::optional<RectWindow> window = std::nullopt,
                                std::vector<std::string>* warnings = nullptr);

/// Writes x,y,label with full precision; load_points_csv with the same
/// window gives back the same set.
void save_points_csv(const std::string& path, const MarkedPointSet& pts);
std::string format_points_csv(const MarkedPointSet& pts);

/// "xmin,xmax,ymin,ymax".
RectWindow parse_window(const std::string& text);

/// NNCT with the NN-structure scalars, as JSON:
///   {"names": [...], "counts": [[...], ...], "Q": 472, "R": 454}
struct NnctFile {
  std::vector<std::string> names;
  std::vector<std::vector<long>> counts;
  std::uint64_t Q = 0;
  std::uint64_t R = 0;

  void validate() const;
  Nnct table() const;
};

NnctFile parse_nnct_json(const std::string& text);
NnctFile load_nnct_json(const std::string& path);
std::string format_nnct_json(const NnctFile& f);

/// t,estimate,lower,upper (lower/upper empty when absent).
std::string format_curve_csv(const CurveWithEnvelope& c);

/// Line plot of estimate with a shaded envelope.
std::string format_curve_svg(const CurveWithEnvelope& c, const std::string& title,
                             const std::string& ylabel);

/// FNV-1a 64 as 16 hex digits.
std::string fnv1a_hex(const std::string& data);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace segpoint

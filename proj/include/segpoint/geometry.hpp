#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace segpoint {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

/// Axis-aligned rectangular observation window.
struct RectWindow {
  double xmin = 0.0;
  double xmax = 1.0;
  double ymin = 0.0;
  double ymax = 1.0;

  double width() const { return xmax - xmin; }
  double height() const { return ymax - ymin; }
  double area() const { return width() * height(); }
  double shorter_side() const;
  bool contains(const Point2& p) const;

  /// Throws InputError unless xmax > xmin and ymax > ymin (all finite).
  void validate() const;

  static RectWindow unit() { return {}; }
  static RectWindow bounding_box(std::span<const Point2> pts);

  friend bool operator==(const RectWindow&, const RectWindow&) = default;
};

inline double squared_distance(const Point2& a, const Point2& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

double distance(const Point2& a, const Point2& b);

/// Points with class labels in {0..q-1} and an observation window.
///
/// Classes may be empty (size 0); q itself is at least 2 so that the
/// contingency table is always at least 2x2.
class MarkedPointSet {
 public:
  MarkedPointSet(std::vector<Point2> points, std::vector<int> labels,
                 RectWindow window, int num_classes,
                 std::vector<std::string> class_names = {});

  std::size_t size() const { return points_.size(); }
  int num_classes() const { return num_classes_; }
  std::span<const Point2> points() const { return points_; }
  std::span<const int> labels() const { return labels_; }
  const RectWindow& window() const { return window_; }
  std::span<const long> class_sizes() const { return class_sizes_; }
  const std::vector<std::string>& class_names() const { return class_names_; }

  /// Points belonging to one class, in input order.
  std::vector<Point2> class_points(int cls) const;

  /// Same locations and window, new labels (must keep q).
  MarkedPointSet relabeled(std::vector<int> labels) const;

 private:
  std::vector<Point2> points_;
  std::vector<int> labels_;
  RectWindow window_;
  int num_classes_;
  std::vector<long> class_sizes_;
  std::vector<std::string> class_names_;
};

}  // namespace segpoint

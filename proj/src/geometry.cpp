#include "segpoint/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "segpoint/error.hpp"

namespace segpoint {

double RectWindow::shorter_side() const { return std::min(width(), height()); }

bool RectWindow::contains(const Point2& p) const {
  return p.x >= xmin && p.x <= xmax && p.y >= ymin && p.y <= ymax;
}

void RectWindow::validate() const {
  if (!std::isfinite(xmin) || !std::isfinite(xmax) || !std::isfinite(ymin) ||
      !std::isfinite(ymax)) {
    throw InputError("window bounds must be finite");
  }
  if (!(xmax > xmin) || !(ymax > ymin)) {
    throw InputError("window must have positive area (xmax > xmin, ymax > ymin)");
  }
}

RectWindow RectWindow::bounding_box(std::span<const Point2> pts) {
  if (pts.empty()) throw InputError("bounding box of an empty point set");
  RectWindow w{std::numeric_limits<double>::infinity(),
               -std::numeric_limits<double>::infinity(),
               std::numeric_limits<double>::infinity(),
               -std::numeric_limits<double>::infinity()};
  for (const auto& p : pts) {
    w.xmin = std::min(w.xmin, p.x);
    w.xmax = std::max(w.xmax, p.x);
    w.ymin = std::min(w.ymin, p.y);
    w.ymax = std::max(w.ymax, p.y);
  }
  return w;
}

double distance(const Point2& a, const Point2& b) {
  return std::sqrt(squared_distance(a, b));
}

MarkedPointSet::MarkedPointSet(std::vector<Point2> points,
                               std::vector<int> labels, RectWindow window,
                               int num_classes,
                               std::vector<std::string> class_names)
    : points_(std::move(points)),
      labels_(std::move(labels)),
      window_(window),
      num_classes_(num_classes),
      class_names_(std::move(class_names)) {
  if (points_.size() != labels_.size()) {
    throw InputError("points and labels differ in length");
  }
  if (points_.size() < 2) throw InputError("need at least 2 points");
  if (num_classes_ < 2) throw InputError("need at least 2 classes");
  window_.validate();
  for (const auto& p : points_) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw InputError("non-finite coordinate");
    }
  }
  class_sizes_.assign(static_cast<std::size_t>(num_classes_), 0);
  for (int lab : labels_) {
    if (lab < 0 || lab >= num_classes_) {
      throw InputError("label " + std::to_string(lab) + " outside 0.." +
                       std::to_string(num_classes_ - 1));
    }
    ++class_sizes_[static_cast<std::size_t>(lab)];
  }
  if (class_names_.empty()) {
    for (int c = 0; c < num_classes_; ++c) {
      class_names_.push_back(std::to_string(c + 1));
    }
  } else if (class_names_.size() != static_cast<std::size_t>(num_classes_)) {
    throw InputError("class name count does not match number of classes");
  }
}

std::vector<Point2> MarkedPointSet::class_points(int cls) const {
  std::vector<Point2> out;
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (labels_[i] == cls) out.push_back(points_[i]);
  }
  return out;
}

MarkedPointSet MarkedPointSet::relabeled(std::vector<int> labels) const {
  return MarkedPointSet(points_, std::move(labels), window_, num_classes_,
                        class_names_);
}

}  // namespace segpoint

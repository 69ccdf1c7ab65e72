#include "segpoint/patterns.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include "segpoint/error.hpp"

namespace segpoint {

namespace {

long total(const std::vector<long>& sizes) {
  long n = 0;
  for (long s : sizes) n += s;
  return n;
}

void check_sizes(const std::vector<long>& sizes) {
  if (sizes.size() < 2) throw InputError("patterns need at least 2 classes");
  for (long s : sizes) {
    if (s <= 0) throw InputError("class sizes must be positive");
  }
}

void fill_uniform(std::vector<Point2>& pts, std::vector<int>& labels, long count, int label,
                  double x0, double x1, double y0, double y1, Rng& rng) {
  for (long k = 0; k < count; ++k) {
    const double x = rng.uniform(x0, x1);
    const double y = rng.uniform(y0, y1);
    pts.push_back({x, y});
    labels.push_back(label);
  }
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

double parse_number(const std::string& text) {
  const auto slash = text.find('/');
  auto parse_plain = [&](const std::string& t) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(t, &used);
    } catch (const std::exception&) {
      throw InputError("not a number: '" + text + "'");
    }
    if (used != t.size()) throw InputError("not a number: '" + text + "'");
    return v;
  };
  if (slash == std::string::npos) return parse_plain(text);
  const double num = parse_plain(text.substr(0, slash));
  const double den = parse_plain(text.substr(slash + 1));
  if (den == 0.0) throw InputError("zero denominator in '" + text + "'");
  return num / den;
}

void PatternSpec::validate() const {
  check_sizes(class_sizes);
  window.validate();
  const int q = num_classes();
  switch (kind) {
    case PatternKind::csr:
      break;
    case PatternKind::rl_case:
      if (q == 2 && (rl_case < 1 || rl_case > 3)) {
        throw InputError("two-class RL layouts are 1, 2 and 3");
      }
      if (q == 3 && (rl_case < 1 || rl_case > 2)) {
        throw InputError("three-class RL layouts are 1 and 2");
      }
      if (q > 3 && rl_case != 1) throw InputError("only RL layout 1 exists for q > 3");
      break;
    case PatternKind::segregation2:
      if (q != 2) throw InputError("two-class segregation needs 2 class sizes");
      if (!(s >= 0.0 && s < 1.0)) throw InputError("segregation s must be in [0, 1)");
      break;
    case PatternKind::segregation3:
      if (q != 3) throw InputError("three-class segregation needs 3 class sizes");
      if (!(s >= 0.0 && s < 0.5)) throw InputError("segregation s must be in [0, 1/2)");
      break;
    case PatternKind::association2:
      if (q != 2) throw InputError("two-class association needs 2 class sizes");
      if (!(r > 0.0 && r < 1.0)) throw InputError("association r must be in (0, 1)");
      break;
    case PatternKind::association3:
      if (q != 3) throw InputError("three-class association needs 3 class sizes");
      if (!(r_y > 0.0 && r_y < 1.0) || !(r_z > 0.0 && r_z < 1.0)) {
        throw InputError("association r_y and r_z must be in (0, 1)");
      }
      break;
  }
}

PatternSpec PatternSpec::from_scenario(const std::string& scenario, std::vector<long> sizes,
                                       RectWindow window, std::uint64_t seed) {
  PatternSpec spec;
  spec.class_sizes = std::move(sizes);
  spec.window = window;
  spec.seed = seed;
  const auto colon = scenario.find(':');
  const std::string head = scenario.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : scenario.substr(colon + 1);
  const int q = spec.num_classes();
  if (head == "csr" && arg.empty()) {
    spec.kind = PatternKind::csr;
  } else if (head == "rl") {
    spec.kind = PatternKind::rl_case;
    spec.rl_case = static_cast<int>(parse_number(arg));
  } else if (head == "seg") {
    spec.kind = q == 3 ? PatternKind::segregation3 : PatternKind::segregation2;
    spec.s = parse_number(arg);
  } else if (head == "assoc") {
    const auto comma = arg.find(',');
    if (comma == std::string::npos) {
      spec.kind = PatternKind::association2;
      spec.r = parse_number(arg);
    } else {
      spec.kind = PatternKind::association3;
      spec.r_y = parse_number(arg.substr(0, comma));
      spec.r_z = parse_number(arg.substr(comma + 1));
    }
  } else {
    throw InputError("unknown scenario '" + scenario +
                     "' (expected csr, rl:K, seg:S, assoc:R or assoc:RY,RZ)");
  }
  spec.validate();
  return spec;
}

std::string PatternSpec::scenario() const {
  switch (kind) {
    case PatternKind::csr:
      return "csr";
    case PatternKind::rl_case:
      return "rl:" + std::to_string(rl_case);
    case PatternKind::segregation2:
    case PatternKind::segregation3:
      return "seg:" + fmt(s);
    case PatternKind::association2:
      return "assoc:" + fmt(r);
    case PatternKind::association3:
      return "assoc:" + fmt(r_y) + "," + fmt(r_z);
  }
  return "?";
}

MarkedPointSet gen_csr(const std::vector<long>& sizes, const RectWindow& window, Rng& rng) {
  // Empty classes are allowed here so observed sets with an empty class can
  // be simulated; the point set itself enforces n >= 2.
  if (sizes.size() < 2) throw InputError("patterns need at least 2 classes");
  for (long s : sizes) {
    if (s < 0) throw InputError("class sizes must be nonnegative");
  }
  window.validate();
  std::vector<Point2> pts;
  std::vector<int> labels;
  pts.reserve(static_cast<std::size_t>(total(sizes)));
  labels.reserve(pts.capacity());
  for (std::size_t c = 0; c < sizes.size(); ++c) {
    fill_uniform(pts, labels, sizes[c], static_cast<int>(c), window.xmin, window.xmax,
                 window.ymin, window.ymax, rng);
  }
  return MarkedPointSet(std::move(pts), std::move(labels), window,
                        static_cast<int>(sizes.size()));
}

MarkedPointSet gen_rl_layout(int rl_case, const std::vector<long>& sizes, Rng& rng) {
  check_sizes(sizes);
  const int q = static_cast<int>(sizes.size());
  std::vector<Point2> pts;
  std::vector<int> labels;
  RectWindow window = RectWindow::unit();
  if (rl_case == 1) {
    for (int c = 0; c < q; ++c) fill_uniform(pts, labels, sizes[c], c, 0, 1, 0, 1, rng);
  } else if (q == 2 && rl_case == 2) {
    fill_uniform(pts, labels, sizes[0], 0, 0, 2.0 / 3.0, 0, 2.0 / 3.0, rng);
    fill_uniform(pts, labels, sizes[1], 1, 1.0 / 3.0, 1, 1.0 / 3.0, 1, rng);
  } else if (q == 2 && rl_case == 3) {
    fill_uniform(pts, labels, sizes[0], 0, 0, 1, 0, 1, rng);
    fill_uniform(pts, labels, sizes[1], 1, 2, 3, 0, 1, rng);
    window = {0, 3, 0, 1};
  } else if (q == 3 && rl_case == 2) {
    fill_uniform(pts, labels, sizes[0], 0, 0, 1, 0, 1, rng);
    fill_uniform(pts, labels, sizes[1], 1, 2, 3, 0, 1, rng);
    fill_uniform(pts, labels, sizes[2], 2, 1, 2, 2, 3, rng);
    window = {0, 3, 0, 3};
  } else {
    throw InputError("no RL layout " + std::to_string(rl_case) + " for " + std::to_string(q) +
                     " classes");
  }
  return MarkedPointSet(std::move(pts), std::move(labels), window, q);
}

std::vector<int> random_labels(const std::vector<long>& sizes, Rng& rng) {
  std::vector<int> labels;
  for (std::size_t c = 0; c < sizes.size(); ++c) {
    labels.insert(labels.end(), static_cast<std::size_t>(sizes[c]), static_cast<int>(c));
  }
  rng.shuffle(std::span<int>(labels));
  return labels;
}

MarkedPointSet relabel(const MarkedPointSet& pts, Rng& rng) {
  std::vector<int> labels(pts.labels().begin(), pts.labels().end());
  rng.shuffle(std::span<int>(labels));
  return pts.relabeled(std::move(labels));
}

MarkedPointSet gen_segregation(const PatternSpec& spec, Rng& rng) {
  spec.validate();
  const auto& n = spec.class_sizes;
  const double s = spec.s;
  std::vector<Point2> pts;
  std::vector<int> labels;
  if (spec.kind == PatternKind::segregation2) {
    fill_uniform(pts, labels, n[0], 0, 0, 1 - s, 0, 1 - s, rng);
    fill_uniform(pts, labels, n[1], 1, s, 1, s, 1, rng);
  } else if (spec.kind == PatternKind::segregation3) {
    fill_uniform(pts, labels, n[0], 0, 0, 1 - 2 * s, 0, 1 - 2 * s, rng);
    fill_uniform(pts, labels, n[1], 1, 2 * s, 1, 2 * s, 1, rng);
    fill_uniform(pts, labels, n[2], 2, s, 1 - s, s, 1 - s, rng);
  } else {
    throw InputError("gen_segregation needs a segregation spec");
  }
  return MarkedPointSet(std::move(pts), std::move(labels), RectWindow::unit(),
                        spec.num_classes());
}

MarkedPointSet gen_association(const PatternSpec& spec, Rng& rng) {
  spec.validate();
  const auto& n = spec.class_sizes;
  std::vector<Point2> pts;
  std::vector<int> labels;
  fill_uniform(pts, labels, n[0], 0, 0, 1, 0, 1, rng);
  const auto parents = static_cast<std::uint64_t>(n[0]);
  auto offspring = [&](long count, int label, double radius) {
    for (long k = 0; k < count; ++k) {
      const Point2 parent = pts[static_cast<std::size_t>(rng.below(parents))];
      const double rho = rng.uniform(0.0, radius);
      const double theta = rng.uniform(0.0, 2.0 * std::numbers::pi);
      pts.push_back({parent.x + rho * std::cos(theta), parent.y + rho * std::sin(theta)});
      labels.push_back(label);
    }
  };
  if (spec.kind == PatternKind::association2) {
    offspring(n[1], 1, spec.r);
  } else if (spec.kind == PatternKind::association3) {
    offspring(n[1], 1, spec.r_y);
    offspring(n[2], 2, spec.r_z);
  } else {
    throw InputError("gen_association needs an association spec");
  }
  // Offspring are not clipped to the unit square.
  return MarkedPointSet(std::move(pts), std::move(labels), RectWindow::unit(),
                        spec.num_classes());
}

MarkedPointSet generate(const PatternSpec& spec, std::uint64_t replicate) {
  Rng rng(spec.seed, kStreamPattern, replicate);
  switch (spec.kind) {
    case PatternKind::csr:
      return gen_csr(spec.class_sizes, spec.window, rng);
    case PatternKind::rl_case: {
      Rng layout_rng(spec.seed, kStreamLayout, spec.regenerate_locations ? replicate : 0);
      const MarkedPointSet layout = gen_rl_layout(spec.rl_case, spec.class_sizes, layout_rng);
      return layout.relabeled(random_labels(spec.class_sizes, rng));
    }
    case PatternKind::segregation2:
    case PatternKind::segregation3:
      return gen_segregation(spec, rng);
    case PatternKind::association2:
    case PatternKind::association3:
      return gen_association(spec, rng);
  }
  throw InputError("unknown pattern kind");
}

}  // namespace segpoint

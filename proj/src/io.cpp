#include "segpoint/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "segpoint/error.hpp"
#include "segpoint/patterns.hpp"

namespace segpoint {

using nlohmann::json;

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  for (auto& f : out) {
    const auto b = f.find_first_not_of(" \t");
    const auto e = f.find_last_not_of(" \t");
    f = b == std::string::npos ? "" : f.substr(b, e - b + 1);
  }
  return out;
}

std::string quote_csv(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string num(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

}  // namespace

std::string fnv1a_hex(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << content;
}

MarkedPointSet parse_points_csv(const std::string& text, std::optional<RectWindow> window,
                                std::vector<std::string>* warnings) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  int cx = -1;
  int cy = -1;
  int cl = -1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cols = split_csv(line);
    for (int c = 0; c < static_cast<int>(cols.size()); ++c) {
      std::string h = cols[static_cast<std::size_t>(c)];
      std::transform(h.begin(), h.end(), h.begin(), [](unsigned char ch) { return std::tolower(ch); });
      if (h == "x") cx = c;
      if (h == "y") cy = c;
      if (h == "label") cl = c;
    }
    break;
  }
  if (cx < 0 || cy < 0 || cl < 0) {
    throw InputError("line " + std::to_string(lineno) + ": header must name x, y and label columns");
  }
  const auto width = static_cast<std::size_t>(std::max({cx, cy, cl}) + 1);

  std::vector<Point2> pts;
  std::vector<int> labels;
  std::vector<std::string> names;
  std::map<std::string, int> index;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cols = split_csv(line);
    const std::string where = "line " + std::to_string(lineno) + ": ";
    if (cols.size() < width) throw InputError(where + "expected at least " + std::to_string(width) + " fields");
    Point2 p;
    try {
      std::size_t used = 0;
      p.x = std::stod(cols[static_cast<std::size_t>(cx)], &used);
      if (used != cols[static_cast<std::size_t>(cx)].size()) throw std::invalid_argument("x");
      p.y = std::stod(cols[static_cast<std::size_t>(cy)], &used);
      if (used != cols[static_cast<std::size_t>(cy)].size()) throw std::invalid_argument("y");
    } catch (const std::exception&) {
      throw InputError(where + "x and y must be numbers");
    }
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw InputError(where + "coordinates must be finite");
    const std::string& lab = cols[static_cast<std::size_t>(cl)];
    if (lab.empty()) throw InputError(where + "empty label");
    auto [it, fresh] = index.emplace(lab, static_cast<int>(names.size()));
    if (fresh) names.push_back(lab);
    pts.push_back(p);
    labels.push_back(it->second);
  }
  if (pts.size() < 2) throw InputError("need at least 2 points, found " + std::to_string(pts.size()));
  if (names.size() < 2) throw InputError("all points carry the label '" + names[0] + "'; need at least 2 classes");
  RectWindow w;
  if (window) {
    w = *window;
    w.validate();
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (!w.contains(pts[i])) {
        throw InputError("point " + std::to_string(i + 1) + " lies outside the given window");
      }
    }
  } else {
    w = RectWindow::bounding_box(pts);
    if (warnings) {
      warnings->push_back("no window given; using the bounding box [" + num(w.xmin, 6) + "," +
                          num(w.xmax, 6) + "]x[" + num(w.ymin, 6) + "," + num(w.ymax, 6) +
                          "], which affects Monte Carlo and K-function results");
    }
  }
  const int q = static_cast<int>(names.size());
  return MarkedPointSet(std::move(pts), std::move(labels), w, q, std::move(names));
}

MarkedPointSet load_points_csv(const std::string& path, std::optional<RectWindow> window,
                               std::vector<std::string>* warnings) {
  return parse_points_csv(read_file(path), window, warnings);
}

std::string format_points_csv(const MarkedPointSet& pts) {
  std::string out = "x,y,label\n";
  const auto& names = pts.class_names();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const int l = pts.labels()[i];
    out += g17(pts.points()[i].x) + "," + g17(pts.points()[i].y) + "," +
           quote_csv(names[static_cast<std::size_t>(l)]) + "\n";
  }
  return out;
}

void save_points_csv(const std::string& path, const MarkedPointSet& pts) {
  write_file(path, format_points_csv(pts));
}

RectWindow parse_window(const std::string& text) {
  const auto parts = split_csv(text);
  if (parts.size() != 4) throw InputError("window must be xmin,xmax,ymin,ymax");
  RectWindow w{parse_number(parts[0]), parse_number(parts[1]), parse_number(parts[2]),
               parse_number(parts[3])};
  w.validate();
  return w;
}

void NnctFile::validate() const {
  const std::size_t q = counts.size();
  if (q < 2) throw InputError("counts: need at least a 2x2 table");
  for (std::size_t i = 0; i < q; ++i) {
    if (counts[i].size() != q) throw InputError("counts[" + std::to_string(i) + "]: table must be square");
    for (std::size_t j = 0; j < q; ++j) {
      if (counts[i][j] < 0) {
        throw InputError("counts[" + std::to_string(i) + "][" + std::to_string(j) + "]: must be >= 0");
      }
    }
  }
  if (!names.empty() && names.size() != q) throw InputError("names: one name per class is required");
}

Nnct NnctFile::table() const {
  validate();
  return Nnct::from_counts(counts);
}

NnctFile parse_nnct_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("NNCT file is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw InputError("NNCT file must be a JSON object");
  NnctFile f;
  try {
    if (j.contains("names")) f.names = j.at("names").get<std::vector<std::string>>();
    f.counts = j.at("counts").get<std::vector<std::vector<long>>>();
    const auto& q = j.at("Q");
    const auto& r = j.at("R");
    if (!q.is_number_integer() || q.get<long long>() < 0) throw InputError("Q: expected a nonnegative integer");
    if (!r.is_number_integer() || r.get<long long>() < 0) throw InputError("R: expected a nonnegative integer");
    f.Q = q.get<std::uint64_t>();
    f.R = r.get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw InputError(std::string("NNCT file: ") + e.what());
  }
  f.validate();
  if (f.names.empty()) {
    for (std::size_t i = 0; i < f.counts.size(); ++i) f.names.push_back(std::to_string(i + 1));
  }
  return f;
}

NnctFile load_nnct_json(const std::string& path) { return parse_nnct_json(read_file(path)); }

std::string format_nnct_json(const NnctFile& f) {
  nlohmann::ordered_json j;
  j["names"] = f.names;
  j["counts"] = f.counts;
  j["Q"] = f.Q;
  j["R"] = f.R;
  return j.dump(2) + "\n";
}

std::string format_curve_csv(const CurveWithEnvelope& c) {
  std::string out = "t,estimate,lower,upper\n";
  for (std::size_t i = 0; i < c.t.size(); ++i) {
    out += num(c.t[i], 10) + "," + num(c.estimate[i], 10) + ",";
    if (i < c.lower.size()) out += num(c.lower[i], 10);
    out += ",";
    if (i < c.upper.size()) out += num(c.upper[i], 10);
    out += "\n";
  }
  return out;
}

std::string format_curve_svg(const CurveWithEnvelope& c, const std::string& title,
                             const std::string& ylabel) {
  const double W = 640;
  const double H = 420;
  const double L = 70;
  const double R = 20;
  const double T = 40;
  const double B = 50;
  double ymin = 0.0;
  double ymax = 0.0;
  bool first = true;
  auto extend = [&](double v) {
    if (!std::isfinite(v)) return;
    if (first) {
      ymin = ymax = v;
      first = false;
    }
    ymin = std::min(ymin, v);
    ymax = std::max(ymax, v);
  };
  for (double v : c.estimate) extend(v);
  for (double v : c.lower) extend(v);
  for (double v : c.upper) extend(v);
  if (ymax <= ymin) ymax = ymin + 1.0;
  const double tmin = c.t.empty() ? 0.0 : c.t.front();
  const double tmax = c.t.empty() ? 1.0 : c.t.back();
  auto px = [&](double t) { return L + (t - tmin) / (tmax - tmin + 1e-300) * (W - L - R); };
  auto py = [&](double v) { return H - B - (v - ymin) / (ymax - ymin) * (H - T - B); };
  auto path = [&](const std::vector<double>& v) {
    std::string d;
    for (std::size_t i = 0; i < v.size(); ++i) {
      d += (i ? " L" : "M") + num(px(c.t[i]), 6) + "," + num(py(v[i]), 6);
    }
    return d;
  };
  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(W, 6) +
                    "\" height=\"" + num(H, 6) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (c.lower.size() == c.t.size() && c.upper.size() == c.t.size() && !c.t.empty()) {
    std::string band = path(c.upper);
    for (std::size_t i = c.t.size(); i-- > 0;) {
      band += " L" + num(px(c.t[i]), 6) + "," + num(py(c.lower[i]), 6);
    }
    svg += "<path d=\"" + band + " Z\" fill=\"#cccccc\" stroke=\"none\"/>\n";
  }
  if (ymin < 0.0 && ymax > 0.0) {
    svg += "<line x1=\"" + num(L, 6) + "\" x2=\"" + num(W - R, 6) + "\" y1=\"" + num(py(0), 6) +
           "\" y2=\"" + num(py(0), 6) + "\" stroke=\"#888\" stroke-dasharray=\"4 3\"/>\n";
  }
  svg += "<path d=\"" + path(c.estimate) + "\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\"/>\n";
  svg += "<rect x=\"" + num(L, 6) + "\" y=\"" + num(T, 6) + "\" width=\"" + num(W - L - R, 6) +
         "\" height=\"" + num(H - T - B, 6) + "\" fill=\"none\" stroke=\"black\"/>\n";
  svg += "<text x=\"" + num(W / 2, 6) + "\" y=\"24\" text-anchor=\"middle\">" + title + "</text>\n";
  svg += "<text x=\"" + num((L + W - R) / 2, 6) + "\" y=\"" + num(H - 12, 6) +
         "\" text-anchor=\"middle\">t</text>\n";
  svg += "<text x=\"16\" y=\"" + num(H / 2, 6) + "\" transform=\"rotate(-90 16 " + num(H / 2, 6) +
         ")\" text-anchor=\"middle\">" + ylabel + "</text>\n";
  for (int k = 0; k <= 4; ++k) {
    const double t = tmin + (tmax - tmin) * k / 4.0;
    const double v = ymin + (ymax - ymin) * k / 4.0;
    svg += "<text x=\"" + num(px(t), 6) + "\" y=\"" + num(H - B + 16, 6) +
           "\" text-anchor=\"middle\">" + num(t, 3) + "</text>\n";
    svg += "<text x=\"" + num(L - 6, 6) + "\" y=\"" + num(py(v) + 4, 6) +
           "\" text-anchor=\"end\">" + num(v, 3) + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace segpoint

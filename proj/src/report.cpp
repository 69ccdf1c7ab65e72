#include "segpoint/report.hpp"

#include <cmath>
#include <cstdio>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "segpoint/error.hpp"
#include "segpoint/experiment.hpp"
#include "segpoint/moments.hpp"
#include "segpoint/nn_graph.hpp"

namespace segpoint {

namespace {

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string general(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string input_hash(const AnalysisRequest& req) {
  if (req.points) {
    const auto& w = req.points->window();
    return fnv1a_hex(format_points_csv(*req.points) + fixed(w.xmin, 17) + fixed(w.xmax, 17) +
                     fixed(w.ymin, 17) + fixed(w.ymax, 17));
  }
  return fnv1a_hex(format_nnct_json(*req.nnct));
}

}  // namespace

OutputFormat parse_output_format(const std::string& s) {
  if (s == "text") return OutputFormat::text;
  if (s == "csv") return OutputFormat::csv;
  if (s == "json") return OutputFormat::json;
  throw InputError("unknown output format '" + s + "' (text, csv or json)");
}

std::string format_statistic(double x) { return fixed(x, 2); }

std::string format_pvalue(double p) {
  if (p < 1e-4) return "<.0001";
  std::string s = fixed(p, 4);
  if (s.rfind("0.", 0) == 0) s.erase(0, 1);
  return s;
}

std::vector<std::vector<double>> row_percentages(const Nnct& t) {
  const auto rows = t.row_sums();
  std::vector<std::vector<double>> out(static_cast<std::size_t>(t.q()));
  for (int i = 0; i < t.q(); ++i) {
    for (int j = 0; j < t.q(); ++j) {
      const double s = static_cast<double>(rows[static_cast<std::size_t>(i)]);
      out[static_cast<std::size_t>(i)].push_back(s > 0 ? 100.0 * static_cast<double>(t(i, j)) / s
                                                       : 0.0);
    }
  }
  return out;
}

std::vector<std::vector<double>> column_percentages(const Nnct& t) {
  const auto cols = t.col_sums();
  std::vector<std::vector<double>> out(static_cast<std::size_t>(t.q()));
  for (int i = 0; i < t.q(); ++i) {
    for (int j = 0; j < t.q(); ++j) {
      const double s = static_cast<double>(cols[static_cast<std::size_t>(j)]);
      out[static_cast<std::size_t>(i)].push_back(s > 0 ? 100.0 * static_cast<double>(t(i, j)) / s
                                                       : 0.0);
    }
  }
  return out;
}

std::string test_label(const StatisticSelector& s, const std::vector<std::string>& names) {
  if (s.kind == TestKind::overall) return "overall";
  const std::string& n = names.at(static_cast<std::size_t>(s.cls));
  return (s.kind == TestKind::base ? "base " : "NN ") + n;
}

AnalysisReport analyze(const AnalysisRequest& req) {
  if (req.points.has_value() == req.nnct.has_value()) {
    throw InputError("analysis needs exactly one of a point set or an NNCT");
  }
  AnalysisReport rep;
  rep.percentages = req.percentages;
  std::vector<long> sizes;
  if (req.points) {
    const MarkedPointSet& pts = *req.points;
    const NnGraph g = build_nn_graph(pts);
    rep.table = build_nnct(pts, g);
    rep.Q = g.Q;
    rep.R = g.R;
    rep.names = pts.class_names();
    sizes.assign(pts.class_sizes().begin(), pts.class_sizes().end());
  } else {
    rep.table = req.nnct->table();
    rep.Q = req.nnct->Q;
    rep.R = req.nnct->R;
    rep.names = req.nnct->names;
    sizes = rep.table.row_sums();
  }
  const int q = rep.table.q();
  if (rep.names.size() != static_cast<std::size_t>(q)) {
    rep.names.clear();
    for (int i = 1; i <= q; ++i) rep.names.push_back(std::to_string(i));
  }
  const MomentModel m = cell_moments(sizes, rep.Q, rep.R);
  for (const auto& w : m.warnings) rep.warnings.push_back(w);

  std::vector<StatisticSelector> selectors = req.tests;
  if (selectors.empty()) {
    for (const auto& s : all_selectors(q)) {
      if (s.kind == TestKind::base && sizes[static_cast<std::size_t>(s.cls)] <= 1) {
        rep.warnings.push_back("skipped " + test_label(s, rep.names) + ": class has fewer than 2 points");
        continue;
      }
      selectors.push_back(s);
    }
  }
  for (const auto& s : selectors) {
    if (s.cls < 0 || s.cls >= q) throw InputError("test " + s.name() + " names a class that does not exist");
    rep.tests.push_back(run_test(rep.table, m, s));
    for (const auto& w : rep.tests.back().warnings) rep.warnings.push_back(s.name() + ": " + w);
  }

  if (req.mc) {
    rep.seed = req.mc->master_seed;
    if (!req.points) {
      rep.warnings.push_back("Monte Carlo p-values need point coordinates; only asymptotic p-values are reported");
    } else {
      rep.mc_replicates = req.mc->replicates;
      const auto p_mc = mc_sim_pvalue(*req.points, selectors, *req.mc);
      const auto p_rand = mc_rand_pvalue(*req.points, selectors, *req.mc);
      for (std::size_t k = 0; k < rep.tests.size(); ++k) {
        rep.tests[k].p_mc = p_mc[k];
        rep.tests[k].p_rand = p_rand[k];
      }
    }
  }
  rep.input_hash = input_hash(req);
  return rep;
}

namespace {

void text_matrix(std::ostringstream& os, const std::vector<std::string>& names,
                 const std::vector<std::vector<std::string>>& cells,
                 const std::vector<std::string>& row_tail, const std::vector<std::string>& col_tail,
                 const std::string& tail_name) {
  std::size_t w = 6;
  for (const auto& n : names) w = std::max(w, n.size() + 2);
  for (const auto& r : cells)
    for (const auto& c : r) w = std::max(w, c.size() + 2);
  os << std::left << std::setw(static_cast<int>(w)) << "base\\NN";
  os << std::right;
  for (const auto& n : names) os << std::setw(static_cast<int>(w)) << n;
  if (!row_tail.empty()) os << std::setw(static_cast<int>(w)) << tail_name;
  os << "\n";
  for (std::size_t i = 0; i < cells.size(); ++i) {
    os << std::left << std::setw(static_cast<int>(w)) << names[i] << std::right;
    for (const auto& c : cells[i]) os << std::setw(static_cast<int>(w)) << c;
    if (!row_tail.empty()) os << std::setw(static_cast<int>(w)) << row_tail[i];
    os << "\n";
  }
  if (!col_tail.empty()) {
    os << std::left << std::setw(static_cast<int>(w)) << tail_name << std::right;
    for (const auto& c : col_tail) os << std::setw(static_cast<int>(w)) << c;
    os << "\n";
  }
}

}  // namespace

std::string format_report(const AnalysisReport& r, OutputFormat fmt) {
  const int q = r.table.q();
  const std::string& input = r.input_hash;
  const std::vector<std::string>& warnings = r.warnings;
  std::ostringstream os;
  if (fmt == OutputFormat::json) {
    nlohmann::ordered_json j;
    j["tool"] = "segpoint";
    j["version"] = kVersion;
    j["seed"] = r.seed ? nlohmann::ordered_json(*r.seed) : nlohmann::ordered_json(nullptr);
    j["input_hash"] = input;
    j["names"] = r.names;
    std::vector<std::vector<long>> counts(static_cast<std::size_t>(q));
    for (int i = 0; i < q; ++i)
      for (int k = 0; k < q; ++k) counts[static_cast<std::size_t>(i)].push_back(r.table(i, k));
    j["nnct"] = counts;
    j["Q"] = r.Q;
    j["R"] = r.R;
    if (r.mc_replicates) j["mc_replicates"] = *r.mc_replicates;
    if (r.percentages) {
      j["row_percentages"] = row_percentages(r.table);
      j["column_percentages"] = column_percentages(r.table);
    }
    auto tests = nlohmann::ordered_json::array();
    for (const auto& t : r.tests) {
      nlohmann::ordered_json e;
      e["test"] = t.which.name();
      e["label"] = test_label(t.which, r.names);
      e["statistic"] = t.statistic;
      e["df"] = t.df;
      e["p_asy"] = t.p_asy;
      if (t.p_mc) e["p_mc"] = *t.p_mc;
      if (t.p_rand) e["p_rand"] = *t.p_rand;
      tests.push_back(e);
    }
    j["tests"] = tests;
    j["warnings"] = warnings;
    return j.dump(2) + "\n";
  }
  if (fmt == OutputFormat::csv) {
    os << "# segpoint " << kVersion << " seed=" << (r.seed ? std::to_string(*r.seed) : "none")
       << " input=" << input << "\n";
    os << "test,label,statistic,df,p_asy,p_mc,p_rand\n";
    for (const auto& t : r.tests) {
      os << t.which.name() << ",\"" << test_label(t.which, r.names) << "\"," << general(t.statistic)
         << "," << t.df << "," << general(t.p_asy) << ","
         << (t.p_mc ? general(*t.p_mc) : "") << "," << (t.p_rand ? general(*t.p_rand) : "")
         << "\n";
    }
    return os.str();
  }

  os << "segpoint " << kVersion << "  seed " << (r.seed ? std::to_string(*r.seed) : "-")
     << "  input " << input << "\n";
  os << "n = " << r.table.total() << ", q = " << q << ", Q = " << r.Q << ", R = " << r.R << "\n\n";
  {
    std::vector<std::vector<std::string>> cells(static_cast<std::size_t>(q));
    for (int i = 0; i < q; ++i)
      for (int k = 0; k < q; ++k) cells[static_cast<std::size_t>(i)].push_back(std::to_string(r.table(i, k)));
    std::vector<std::string> rows;
    std::vector<std::string> cols;
    for (long v : r.table.row_sums()) rows.push_back(std::to_string(v));
    for (long v : r.table.col_sums()) cols.push_back(std::to_string(v));
    cols.push_back(std::to_string(r.table.total()));
    os << "NNCT\n";
    text_matrix(os, r.names, cells, rows, cols, "sum");
  }
  if (r.percentages) {
    auto pct = [&](const std::vector<std::vector<double>>& p, const char* title) {
      std::vector<std::vector<std::string>> cells;
      for (const auto& row : p) {
        cells.emplace_back();
        for (double v : row) cells.back().push_back(fixed(v, 0) + "%");
      }
      os << "\n" << title << "\n";
      text_matrix(os, r.names, cells, {}, {}, "");
    };
    pct(row_percentages(r.table), "row percentages");
    pct(column_percentages(r.table), "column percentages");
  }
  os << "\n";
  std::size_t w = 8;
  for (const auto& t : r.tests) w = std::max(w, test_label(t.which, r.names).size() + 2);
  os << std::left << std::setw(static_cast<int>(w)) << "test" << std::right << std::setw(11)
     << "statistic" << std::setw(5) << "df" << std::setw(9) << "p_asy";
  if (r.mc_replicates) os << std::setw(9) << "p_mc" << std::setw(9) << "p_rand";
  os << "\n";
  for (const auto& t : r.tests) {
    os << std::left << std::setw(static_cast<int>(w)) << test_label(t.which, r.names) << std::right
       << std::setw(11) << format_statistic(t.statistic) << std::setw(5) << t.df << std::setw(9)
       << format_pvalue(t.p_asy);
    if (r.mc_replicates) {
      os << std::setw(9) << (t.p_mc ? format_pvalue(*t.p_mc) : "-") << std::setw(9)
         << (t.p_rand ? format_pvalue(*t.p_rand) : "-");
    }
    os << "\n";
  }
  if (r.mc_replicates) os << "(Monte Carlo p-values from " << *r.mc_replicates << " replicates)\n";
  for (const auto& wmsg : warnings) os << "warning: " << wmsg << "\n";
  return os.str();
}

}  // namespace segpoint

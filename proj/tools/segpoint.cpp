#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "segpoint/error.hpp"
#include "segpoint/experiment.hpp"
#include "segpoint/io.hpp"
#include "segpoint/nn_graph.hpp"
#include "segpoint/patterns.hpp"
#include "segpoint/report.hpp"
#include "segpoint/second_order.hpp"

using namespace segpoint;

namespace {

struct AnalyzeArgs {
  std::string points;
  std::string nnct;
  std::string window;
  std::string tests;
  std::size_t mc = 0;
  std::uint64_t seed = 1;
  unsigned workers = 0;
  std::string format = "text";
  bool percentages = false;
  std::string out;
};

struct SimulateArgs {
  std::string config;
  std::string preset;
  std::string out;
  bool full = false;
  std::size_t replicates = 0;
  std::optional<std::uint64_t> seed;
  unsigned workers = 0;
  bool resume = false;
  bool table = false;
  bool print_config = false;
  bool quiet = false;
};

struct SecondOrderArgs {
  std::string points;
  std::string window;
  std::string which = "l";
  std::string classes;
  std::size_t sims = 99;
  std::uint64_t seed = 1;
  std::size_t grid = 512;
  double max_t = 0.0;
  double bandwidth = 0.0;
  unsigned workers = 0;
  std::string out;
  std::string svg;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    write_file(path, text);
  }
}

void print_warnings(const std::vector<std::string>& w) {
  for (const auto& m : w) std::cerr << "warning: " << m << "\n";
}

int run_analyze(const AnalyzeArgs& a) {
  if (a.points.empty() == a.nnct.empty()) {
    throw InputError("give exactly one of --points or --nnct");
  }
  AnalysisRequest req;
  std::vector<std::string> load_warnings;
  if (!a.points.empty()) {
    std::optional<RectWindow> w;
    if (!a.window.empty()) w = parse_window(a.window);
    req.points = load_points_csv(a.points, w, &load_warnings);
  } else {
    if (!a.window.empty()) load_warnings.push_back("--window is ignored for NNCT input");
    req.nnct = load_nnct_json(a.nnct);
  }
  for (const auto& t : split(a.tests, ',')) req.tests.push_back(StatisticSelector::parse(t));
  if (a.mc > 0) {
    McConfig cfg;
    cfg.replicates = a.mc;
    cfg.master_seed = a.seed;
    cfg.workers = a.workers;
    req.mc = cfg;
  }
  req.percentages = a.percentages;
  AnalysisReport rep = analyze(req);
  rep.warnings.insert(rep.warnings.begin(), load_warnings.begin(), load_warnings.end());
  const OutputFormat fmt = parse_output_format(a.format);
  if (fmt != OutputFormat::text) print_warnings(rep.warnings);
  emit(format_report(rep, fmt), a.out);
  return 0;
}

int run_simulate(const SimulateArgs& a) {
  if (a.config.empty() == a.preset.empty()) throw InputError("give exactly one of --config or --preset");
  const std::string text = a.preset.empty() ? read_file(a.config) : preset_config(a.preset);
  if (a.print_config) {
    std::cout << text;
    return 0;
  }
  ExperimentConfig cfg = parse_experiment_config(text);
  if (a.full) cfg.replicates = cfg.full_replicates;
  if (a.replicates > 0) cfg.replicates = a.replicates;
  if (a.seed) cfg.seed = *a.seed;
  cfg.validate();
  const std::string out = a.out.empty() ? cfg.name + ".csv" : a.out;
  RunOptions opts;
  opts.workers = a.workers;
  opts.resume = a.resume;
  if (!a.quiet) opts.progress = &std::cerr;
  const RunResult res = run_experiment(cfg, out, opts);
  if (a.table) print_rows_table(std::cout, res.rows);
  std::cerr << "wrote " << out << " (seed " << cfg.seed << ", M " << cfg.replicates << ", spec "
            << cfg.spec_hash() << ")\n";
  return 0;
}

int class_index(const MarkedPointSet& pts, const std::string& token) {
  const auto& names = pts.class_names();
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == token) return static_cast<int>(i);
  }
  if (!token.empty() && token.find_first_not_of("0123456789") == std::string::npos) {
    const int k = std::stoi(token);
    if (k >= 1 && k <= pts.num_classes()) return k - 1;
  }
  throw InputError("unknown class '" + token + "'");
}

int run_second_order(const SecondOrderArgs& a) {
  std::vector<std::string> warnings;
  std::optional<RectWindow> w;
  if (!a.window.empty()) w = parse_window(a.window);
  const MarkedPointSet pts = load_points_csv(a.points, w, &warnings);
  const RectWindow& win = pts.window();
  const DistanceGrid grid =
      a.max_t > 0 ? DistanceGrid::uniform(a.max_t, a.grid) : default_grid(win, a.grid);
  const auto cls = split(a.classes, ',');
  const int ci = cls.size() > 0 ? class_index(pts, cls[0]) : 0;
  const int cj = cls.size() > 1 ? class_index(pts, cls[1]) : (ci == 0 ? 1 : 0);
  McConfig cfg;
  cfg.replicates = a.sims;
  cfg.master_seed = a.seed;
  cfg.workers = a.workers;
  if (a.sims < 39 && a.which != "d") {
    warnings.push_back("fewer than 39 simulations give envelopes narrower than 95%");
  }
  const std::vector<Point2> pi = pts.class_points(ci);
  const std::vector<Point2> pj = pts.class_points(cj);
  const auto ni = static_cast<long>(pi.size());
  const auto nj = static_cast<long>(pj.size());

  CurveWithEnvelope curve;
  std::string ylabel;
  std::string title;
  std::vector<bool> reliable;
  if (a.which == "k" || a.which == "l") {
    const bool as_l = a.which == "l";
    auto stat = [&](std::span<const Point2> p) {
      auto k = ripley_k_uni(p, win, grid);
      return as_l ? l_minus_t(k, grid) : k;
    };
    curve = envelope(grid, stat(pi), [&](Rng& rng) {
      return stat(gen_csr({ni, 0}, win, rng).class_points(0));
    }, cfg);
    ylabel = as_l ? "L(t) - t" : "K(t)";
    title = (as_l ? "L(t) - t, class " : "K(t), class ") + pts.class_names()[ci];
  } else if (a.which == "kij") {
    if (ci == cj) throw InputError("kij needs two different classes");
    auto stat = [&](std::span<const Point2> p, std::span<const Point2> r) {
      return l_minus_t(ripley_k_biv(p, r, win, grid), grid);
    };
    curve = envelope(grid, stat(pi, pj), [&](Rng& rng) {
      const MarkedPointSet sim = gen_csr({ni, nj}, win, rng);
      return stat(sim.class_points(0), sim.class_points(1));
    }, cfg);
    ylabel = "L_ij(t) - t";
    title = "L_ij(t) - t, " + pts.class_names()[ci] + " vs " + pts.class_names()[cj];
  } else if (a.which == "d") {
    curve = diggle_d(pts, ci, cj, grid, cfg);
    ylabel = "D(t)";
    title = "D(t) = K_" + pts.class_names()[ci] + " - K_" + pts.class_names()[cj];
  } else if (a.which == "pcf") {
    const double h = a.bandwidth > 0 ? a.bandwidth : default_pcf_bandwidth(pi.size(), win);
    const double mnn = build_nn_graph(pi).mean_nn_distance();
    auto g_of = [&](std::span<const Point2> p) {
      return pair_correlation(ripley_k_uni(p, win, grid), grid, h, mnn);
    };
    const PairCorrelation obs = g_of(pi);
    reliable = obs.reliable;
    DistanceGrid gt;
    gt.t = obs.t;
    curve = envelope(gt, obs.g, [&](Rng& rng) {
      return g_of(gen_csr({ni, 0}, win, rng).class_points(0)).g;
    }, cfg);
    ylabel = "g(t)";
    title = "g(t), class " + pts.class_names()[ci];
    warnings.push_back("g(t) below the mean NN distance " + std::to_string(mnn) + " is unreliable");
  } else {
    throw InputError("--which must be k, l, kij, d or pcf");
  }
  print_warnings(warnings);
  std::string csv = "# segpoint " + std::string(kVersion) + " seed=" + std::to_string(a.seed) +
                    " sims=" + std::to_string(a.sims) + " which=" + a.which + "\n" +
                    format_curve_csv(curve);
  emit(csv, a.out);
  if (!a.svg.empty()) write_file(a.svg, format_curve_svg(curve, title, ylabel));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"segpoint: nearest neighbor contingency table tests of spatial segregation"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  AnalyzeArgs an;
  auto* analyze_cmd = app.add_subcommand("analyze", "Segregation tests for a point set or an NNCT");
  analyze_cmd->add_option("--points", an.points, "CSV with columns x,y,label");
  analyze_cmd->add_option("--nnct", an.nnct, "JSON with names, counts, Q and R");
  analyze_cmd->add_option("--window", an.window, "xmin,xmax,ymin,ymax (default: bounding box)");
  analyze_cmd->add_option("--tests", an.tests, "comma list of overall, baseK, nnK (default: all)");
  analyze_cmd->add_option("--mc", an.mc, "Monte Carlo replicates for p_mc and p_rand");
  analyze_cmd->add_option("--seed", an.seed, "master seed");
  analyze_cmd->add_option("--workers", an.workers, "threads (0 = all cores)");
  analyze_cmd->add_option("--format", an.format, "text, csv or json");
  analyze_cmd->add_flag("--percentages", an.percentages, "include row/column percentage tables");
  analyze_cmd->add_option("-o,--out", an.out, "output file (default stdout)");

  SimulateArgs sim;
  std::uint64_t sim_seed = 0;
  auto* simulate_cmd = app.add_subcommand("simulate", "Empirical size and power experiments");
  simulate_cmd->add_option("--config", sim.config, "experiment config file");
  simulate_cmd->add_option("--preset", sim.preset, "bundled config")
      ->check(CLI::IsMember(preset_names()));
  simulate_cmd->add_option("-o,--out", sim.out, "CSV output (default <name>.csv)");
  simulate_cmd->add_flag("--full", sim.full, "use full_replicates (10000 for presets)");
  simulate_cmd->add_option("--replicates", sim.replicates, "override replicates");
  auto* seed_opt = simulate_cmd->add_option("--seed", sim_seed, "override seed");
  simulate_cmd->add_option("--workers", sim.workers, "threads (0 = all cores)");
  simulate_cmd->add_flag("--resume", sim.resume, "continue an interrupted run");
  simulate_cmd->add_flag("--table", sim.table, "print a text table when done");
  simulate_cmd->add_flag("--print-config", sim.print_config, "print the config and exit");
  simulate_cmd->add_flag("-q,--quiet", sim.quiet, "no progress output");

  SecondOrderArgs so;
  auto* so_cmd = app.add_subcommand("secondorder", "Ripley K/L, Diggle D and pair correlation");
  so_cmd->add_option("--points", so.points, "CSV with columns x,y,label")->required();
  so_cmd->add_option("--window", so.window, "xmin,xmax,ymin,ymax (default: bounding box)");
  so_cmd->add_option("--which", so.which, "k, l, kij, d or pcf")
      ->check(CLI::IsMember({"k", "l", "kij", "d", "pcf"}));
  so_cmd->add_option("--classes", so.classes, "class names or 1-based numbers, e.g. case,control");
  so_cmd->add_option("--sims", so.sims, "simulations for the envelope or relabelings for D");
  so_cmd->add_option("--seed", so.seed, "master seed");
  so_cmd->add_option("--grid", so.grid, "number of t values");
  so_cmd->add_option("--max-t", so.max_t, "largest t (default a quarter of the shorter side)");
  so_cmd->add_option("--bandwidth", so.bandwidth, "pair correlation bandwidth (default 0.15/sqrt(lambda))");
  so_cmd->add_option("--workers", so.workers, "threads (0 = all cores)");
  so_cmd->add_option("-o,--out", so.out, "curve CSV (default stdout)");
  so_cmd->add_option("--svg", so.svg, "also write an SVG plot");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*analyze_cmd) return run_analyze(an);
    if (*simulate_cmd) {
      if (*seed_opt) sim.seed = sim_seed;
      return run_simulate(sim);
    }
    if (*so_cmd) return run_second_order(so);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

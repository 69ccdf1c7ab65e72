#include "segpoint/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "segpoint/error.hpp"
#include "segpoint/io.hpp"
#include "segpoint/nn_graph.hpp"
#include "segpoint/patterns.hpp"

namespace segpoint {

using nlohmann::json;

namespace {

constexpr std::uint64_t kStreamItem = 100;

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

// One (scenario, sizes) cell of an experiment.
struct Item {
  std::string scenario;
  std::vector<long> sizes;
  std::size_t scenario_index = 0;
  std::size_t size_index = 0;
};

std::uint64_t item_seed(std::uint64_t master, const Item& it) {
  return derive_seed(master, kStreamItem + it.scenario_index, it.size_index);
}

// Draws the statistics of replicate r. RL with fixed locations reuses the
// layout's graph and moments.
class Sampler {
 public:
  Sampler(const PatternSpec& spec, std::vector<StatisticSelector> selectors)
      : spec_(spec), selectors_(std::move(selectors)) {
    if (spec_.kind == PatternKind::rl_case && !spec_.regenerate_locations) {
      Rng layout_rng(spec_.seed, kStreamLayout, 0);
      const MarkedPointSet layout = gen_rl_layout(spec_.rl_case, spec_.class_sizes, layout_rng);
      graph_ = build_nn_graph(layout);
      model_ = cell_moments(layout.class_sizes(), graph_->Q, graph_->R);
    }
  }

  std::vector<double> operator()(std::size_t r) const {
    if (graph_) {
      Rng rng(spec_.seed, kStreamPattern, r);
      const std::vector<int> labels = random_labels(spec_.class_sizes, rng);
      return compute_statistics(labels, *graph_, *model_, selectors_);
    }
    return compute_statistics(generate(spec_, r), selectors_);
  }

 private:
  PatternSpec spec_;
  std::vector<StatisticSelector> selectors_;
  std::optional<NnGraph> graph_;
  std::optional<MomentModel> model_;
};

struct Thresholds {
  std::vector<CriticalSource> sources;
  std::vector<std::vector<double>> cv;  // [source][selector]
};

// counts[source][selector] += rejections among replicates [begin, end).
void count_block(const Sampler& sampler, std::size_t begin, std::size_t end, unsigned workers,
                 const Thresholds& th, std::vector<std::vector<long>>& counts) {
  std::vector<std::vector<double>> stats(end - begin);
  parallel_for(begin, end, workers, [&](std::size_t r) { stats[r - begin] = sampler(r); });
  for (std::size_t s = 0; s < th.sources.size(); ++s) {
    const bool strict = th.sources[s] == CriticalSource::asymptotic;
    for (const auto& row : stats) {
      for (std::size_t k = 0; k < row.size(); ++k) {
        const bool reject = strict ? row[k] > th.cv[s][k] : row[k] >= th.cv[s][k];
        if (reject) ++counts[s][k];
      }
    }
  }
}

std::vector<double> asymptotic_cv(const std::vector<StatisticSelector>& sel, int q,
                                  double alpha) {
  std::vector<double> out;
  for (const auto& s : sel) out.push_back(chisq_quantile(1.0 - alpha, degrees_of_freedom(s, q)));
  return out;
}

std::vector<double> csr_cv(const std::vector<long>& sizes, std::size_t size_index,
                           const std::vector<StatisticSelector>& sel, std::uint64_t master,
                           std::size_t replicates, double quantile, unsigned workers) {
  McConfig cfg;
  cfg.replicates = replicates;
  cfg.master_seed = derive_seed(master, kStreamCritical, size_index);
  cfg.critical_value_quantile = quantile;
  cfg.workers = workers;
  return mc_critical_values(sizes, RectWindow::unit(), sel, cfg);
}

SizePowerRow make_row(const Item& it, CriticalSource src, std::size_t m,
                      const std::vector<StatisticSelector>& sel, const std::vector<long>& counts,
                      bool flag_size, double alpha) {
  SizePowerRow row;
  row.scenario = it.scenario;
  row.sizes = it.sizes;
  row.source = src;
  row.replicates = m;
  for (std::size_t k = 0; k < sel.size(); ++k) {
    TestRate t;
    t.which = sel[k];
    t.rejections = counts[k];
    t.rate = static_cast<double>(counts[k]) / static_cast<double>(m);
    t.se = std::sqrt(t.rate * (1.0 - t.rate) / static_cast<double>(m));
    if (flag_size) t.flag = size_flag(t.rate, alpha, m);
    row.rates.push_back(std::move(t));
  }
  return row;
}

struct Harness {
  std::uint64_t master = 0;
  std::size_t replicates = 0;
  std::size_t cv_replicates = 0;
  double alpha = 0.05;
  double cv_quantile = 0.95;
  RectWindow window = RectWindow::unit();
  bool regenerate = false;
  bool flag_size = true;
  std::vector<CriticalSource> sources;
  unsigned workers = 0;
  std::map<std::size_t, std::vector<double>> cv_cache;

  PatternSpec spec_for(const Item& it) const {
    PatternSpec spec = PatternSpec::from_scenario(it.scenario, it.sizes, window, item_seed(master, it));
    spec.regenerate_locations = regenerate;
    return spec;
  }

  Thresholds thresholds(const Item& it, const std::vector<StatisticSelector>& sel) {
    Thresholds th;
    th.sources = sources;
    const int q = static_cast<int>(it.sizes.size());
    for (CriticalSource s : sources) {
      if (s == CriticalSource::asymptotic) {
        th.cv.push_back(asymptotic_cv(sel, q, alpha));
      } else {
        auto found = cv_cache.find(it.size_index);
        if (found == cv_cache.end()) {
          found = cv_cache
                      .emplace(it.size_index, csr_cv(it.sizes, it.size_index, sel, master,
                                                     cv_replicates, cv_quantile, workers))
                      .first;
        }
        th.cv.push_back(found->second);
      }
    }
    return th;
  }

  std::vector<SizePowerRow> rows(const Item& it, const std::vector<StatisticSelector>& sel,
                                 const std::vector<std::vector<long>>& counts) const {
    std::vector<SizePowerRow> out;
    for (std::size_t s = 0; s < sources.size(); ++s) {
      out.push_back(make_row(it, sources[s], replicates, sel, counts[s], flag_size, alpha));
    }
    return out;
  }

  std::vector<SizePowerRow> run_all(const std::string& scenario,
                                    const std::vector<std::vector<long>>& sizes) {
    std::vector<SizePowerRow> out;
    for (std::size_t z = 0; z < sizes.size(); ++z) {
      const Item it{scenario, sizes[z], 0, z};
      const auto sel = all_selectors(static_cast<int>(it.sizes.size()));
      const Sampler sampler(spec_for(it), sel);
      const Thresholds th = thresholds(it, sel);
      std::vector<std::vector<long>> counts(sources.size(), std::vector<long>(sel.size(), 0));
      count_block(sampler, 0, replicates, workers, th, counts);
      for (auto& r : rows(it, sel, counts)) out.push_back(std::move(r));
    }
    return out;
  }
};

bool is_null_scenario(const std::string& s) { return s == "csr" || s.rfind("rl:", 0) == 0; }

}  // namespace

std::string to_string(CriticalSource s) {
  return s == CriticalSource::asymptotic ? "asymptotic" : "monte-carlo";
}

const TestRate& SizePowerRow::rate(const StatisticSelector& s) const {
  for (const auto& r : rates) {
    if (r.which == s) return r;
  }
  throw InputError("row has no statistic " + s.name());
}

std::string size_flag(double rate, double alpha, std::size_t replicates) {
  const double se = std::sqrt(alpha * (1.0 - alpha) / static_cast<double>(replicates));
  const double z = (rate - alpha) / se;
  if (z < -1.96) return "c";
  if (z > 1.96) return "l";
  return "";
}

std::vector<SizePowerRow> run_size_experiment(const std::string& scenario,
                                              const std::vector<std::vector<long>>& sizes,
                                              const RectWindow& window, const McConfig& cfg) {
  cfg.validate();
  if (!is_null_scenario(scenario)) {
    throw InputError("size experiments need a null scenario (csr or rl:K), got '" + scenario + "'");
  }
  Harness h;
  h.master = cfg.master_seed;
  h.replicates = cfg.replicates;
  h.alpha = cfg.alpha;
  h.window = window;
  h.sources = {CriticalSource::asymptotic};
  h.workers = cfg.workers;
  return h.run_all(scenario, sizes);
}

std::vector<SizePowerRow> run_power_experiment(const std::string& scenario,
                                               const std::vector<std::vector<long>>& sizes,
                                               const RectWindow& window, const McConfig& cfg,
                                               CriticalSource source,
                                               std::size_t cv_replicates) {
  cfg.validate();
  Harness h;
  h.master = cfg.master_seed;
  h.replicates = cfg.replicates;
  h.cv_replicates = cv_replicates == 0 ? cfg.replicates : cv_replicates;
  h.alpha = cfg.alpha;
  h.cv_quantile = cfg.critical_value_quantile;
  h.window = window;
  h.flag_size = false;
  h.sources = {source};
  h.workers = cfg.workers;
  return h.run_all(scenario, sizes);
}

// ---------------------------------------------------------------- config

void ExperimentConfig::validate() const {
  if (mode != "size" && mode != "power") throw InputError("mode: expected \"size\" or \"power\"");
  if (critical != "asymptotic" && critical != "monte-carlo" && critical != "both") {
    throw InputError("critical: expected \"asymptotic\", \"monte-carlo\" or \"both\"");
  }
  if (scenarios.empty()) throw InputError("scenarios: at least one scenario is required");
  if (sizes.empty()) throw InputError("sizes: at least one size tuple is required");
  const std::size_t q = sizes[0].size();
  for (std::size_t z = 0; z < sizes.size(); ++z) {
    const std::string path = "sizes[" + std::to_string(z) + "]";
    if (sizes[z].size() < 2) throw InputError(path + ": need at least 2 classes");
    if (sizes[z].size() != q) throw InputError(path + ": all tuples must have the same length");
    for (std::size_t c = 0; c < sizes[z].size(); ++c) {
      if (sizes[z][c] < 2) {
        throw InputError(path + "[" + std::to_string(c) + "]: class size must be >= 2");
      }
    }
  }
  for (std::size_t s = 0; s < scenarios.size(); ++s) {
    const std::string path = "scenarios[" + std::to_string(s) + "]";
    if (mode == "size" && !is_null_scenario(scenarios[s])) {
      throw InputError(path + ": size mode needs csr or rl:K, got '" + scenarios[s] + "'");
    }
    for (const auto& sz : sizes) {
      try {
        (void)PatternSpec::from_scenario(scenarios[s], sz, window, 0);
      } catch (const InputError& e) {
        throw InputError(path + ": " + e.what());
      }
    }
  }
  try {
    window.validate();
  } catch (const InputError& e) {
    throw InputError(std::string("window: ") + e.what());
  }
  if (replicates < 1) throw InputError("replicates: must be >= 1");
  if (full_replicates < 1) throw InputError("full_replicates: must be >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("alpha: must be in (0,1)");
  if (!(cv_quantile > 0.0 && cv_quantile < 1.0)) throw InputError("cv_quantile: must be in (0,1)");
  if (critical != "asymptotic" && (cv_replicates == 0 ? replicates : cv_replicates) < 100) {
    throw InputError("cv_replicates: Monte Carlo critical values need at least 100");
  }
  if (block < 1) throw InputError("block: must be >= 1");
}

std::vector<CriticalSource> ExperimentConfig::sources() const {
  if (critical == "asymptotic") return {CriticalSource::asymptotic};
  if (critical == "monte-carlo") return {CriticalSource::monte_carlo};
  return {CriticalSource::asymptotic, CriticalSource::monte_carlo};
}

std::string ExperimentConfig::canonical() const {
  // Key order is fixed by ordered_json; `block` and `name` do not change
  // results but do change the file, so they are included.
  nlohmann::ordered_json j;
  j["name"] = name;
  j["mode"] = mode;
  j["scenarios"] = scenarios;
  j["sizes"] = sizes;
  j["window"] = {window.xmin, window.xmax, window.ymin, window.ymax};
  j["replicates"] = replicates;
  j["seed"] = seed;
  j["alpha"] = alpha;
  j["critical"] = critical;
  j["cv_replicates"] = cv_replicates == 0 ? replicates : cv_replicates;
  j["cv_quantile"] = cv_quantile;
  j["regenerate_locations"] = regenerate_locations;
  j["block"] = block;
  return j.dump();
}

std::string ExperimentConfig::spec_hash() const { return fnv1a_hex(canonical()); }

namespace {

std::string strip_comment(const std::string& line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (c == '"' && (i == 0 || line[i - 1] != '\\')) in_string = !in_string;
    if (c == '#' && !in_string) return line.substr(0, i);
  }
  return line;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

int bracket_depth(const std::string& s) {
  int depth = 0;
  bool in_string = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"' && (i == 0 || s[i - 1] != '\\')) in_string = !in_string;
    if (in_string) continue;
    if (s[i] == '[') ++depth;
    if (s[i] == ']') --depth;
  }
  return depth;
}

std::size_t as_count(const json& v, const std::string& path) {
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw InputError(path + ": expected a nonnegative integer");
  }
  return v.get<std::size_t>();
}

double as_double(const json& v, const std::string& path) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    try {
      return parse_number(v.get<std::string>());
    } catch (const InputError&) {
    }
  }
  throw InputError(path + ": expected a number");
}

std::string as_string(const json& v, const std::string& path) {
  if (!v.is_string()) throw InputError(path + ": expected a quoted string");
  return v.get<std::string>();
}

void apply(ExperimentConfig& cfg, const std::string& key, const json& v) {
  if (key == "name") {
    cfg.name = as_string(v, key);
  } else if (key == "mode") {
    cfg.mode = as_string(v, key);
  } else if (key == "scenarios") {
    if (!v.is_array()) throw InputError("scenarios: expected an array of strings");
    cfg.scenarios.clear();
    for (std::size_t i = 0; i < v.size(); ++i) {
      cfg.scenarios.push_back(as_string(v[i], "scenarios[" + std::to_string(i) + "]"));
    }
  } else if (key == "sizes") {
    if (!v.is_array()) throw InputError("sizes: expected an array of arrays");
    cfg.sizes.clear();
    for (std::size_t z = 0; z < v.size(); ++z) {
      const std::string path = "sizes[" + std::to_string(z) + "]";
      if (!v[z].is_array()) throw InputError(path + ": expected an array of class sizes");
      std::vector<long> tuple;
      for (std::size_t c = 0; c < v[z].size(); ++c) {
        tuple.push_back(
            static_cast<long>(as_count(v[z][c], path + "[" + std::to_string(c) + "]")));
      }
      cfg.sizes.push_back(std::move(tuple));
    }
  } else if (key == "window") {
    if (!v.is_array() || v.size() != 4) {
      throw InputError("window: expected [xmin, xmax, ymin, ymax]");
    }
    cfg.window = {as_double(v[0], "window[0]"), as_double(v[1], "window[1]"),
                  as_double(v[2], "window[2]"), as_double(v[3], "window[3]")};
  } else if (key == "replicates") {
    cfg.replicates = as_count(v, key);
  } else if (key == "full_replicates") {
    cfg.full_replicates = as_count(v, key);
  } else if (key == "seed") {
    if (!v.is_number_integer()) throw InputError("seed: expected an integer");
    cfg.seed = v.is_number_unsigned() ? v.get<std::uint64_t>()
                                      : static_cast<std::uint64_t>(v.get<std::int64_t>());
  } else if (key == "alpha") {
    cfg.alpha = as_double(v, key);
  } else if (key == "critical") {
    cfg.critical = as_string(v, key);
  } else if (key == "cv_replicates") {
    cfg.cv_replicates = as_count(v, key);
  } else if (key == "cv_quantile") {
    cfg.cv_quantile = as_double(v, key);
  } else if (key == "regenerate_locations") {
    if (!v.is_boolean()) throw InputError("regenerate_locations: expected true or false");
    cfg.regenerate_locations = v.get<bool>();
  } else if (key == "block") {
    cfg.block = as_count(v, key);
  } else {
    throw InputError("unknown key '" + key + "'");
  }
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string stmt = trim(strip_comment(line));
    if (stmt.empty()) continue;
    const int start = lineno;
    while (bracket_depth(stmt) > 0 && std::getline(in, line)) {
      ++lineno;
      stmt += " " + trim(strip_comment(line));
    }
    const auto eq = stmt.find('=');
    if (eq == std::string::npos) {
      throw InputError("line " + std::to_string(start) + ": expected key = value");
    }
    const std::string key = trim(stmt.substr(0, eq));
    const std::string value = trim(stmt.substr(eq + 1));
    json v;
    try {
      v = json::parse(value);
    } catch (const json::parse_error&) {
      throw InputError("line " + std::to_string(start) + ": cannot parse value of '" + key + "'");
    }
    try {
      apply(cfg, key, v);
    } catch (const InputError& e) {
      throw InputError("line " + std::to_string(start) + ": " + e.what());
    }
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_experiment_config(ss.str());
}

// ---------------------------------------------------------------- presets

namespace {

const char* kTwoClassSizes =
    "sizes = [[10,10], [10,30], [10,50], [30,30], [30,50], [50,50], [50,100], [100,100]]\n";
const char* kThreeClassSizes =
    "sizes = [[10,10,10], [10,10,30], [10,10,50], [10,30,30], [10,30,50], [10,50,50],\n"
    "         [30,30,30], [30,30,50], [30,50,50], [50,50,50], [50,50,100], [50,100,100],\n"
    "         [100,100,100]]\n";

const std::map<std::string, std::string>& presets() {
  static const std::map<std::string, std::string> p = {
      {"table2", std::string("name = \"table2\"\nmode = \"size\"\nscenarios = [\"csr\"]\n") +
                     kTwoClassSizes + "replicates = 1000\nfull_replicates = 10000\nseed = 2\n"},
      {"table3", std::string("name = \"table3\"\nmode = \"size\"\n"
                             "scenarios = [\"rl:1\", \"rl:2\", \"rl:3\"]\n") +
                     kTwoClassSizes + "replicates = 1000\nfull_replicates = 10000\nseed = 3\n"},
      {"table-3cl-sizes",
       std::string("name = \"table-3cl-sizes\"\nmode = \"size\"\n"
                   "scenarios = [\"csr\", \"rl:1\", \"rl:2\"]\n") +
           kThreeClassSizes + "replicates = 1000\nfull_replicates = 10000\nseed = 4\n"},
      {"power-seg-2cl",
       std::string("name = \"power-seg-2cl\"\nmode = \"power\"\n"
                   "scenarios = [\"seg:1/6\", \"seg:1/4\", \"seg:1/3\"]\n") +
           kTwoClassSizes +
           "replicates = 1000\nfull_replicates = 10000\nseed = 5\ncritical = \"both\"\n"},
      {"power-assoc-2cl",
       std::string("name = \"power-assoc-2cl\"\nmode = \"power\"\n"
                   "scenarios = [\"assoc:1/4\", \"assoc:1/7\", \"assoc:1/10\"]\n") +
           kTwoClassSizes +
           "replicates = 1000\nfull_replicates = 10000\nseed = 6\ncritical = \"both\"\n"},
      {"power-3cl",
       std::string("name = \"power-3cl\"\nmode = \"power\"\n"
                   "scenarios = [\"seg:1/12\", \"seg:1/8\", \"seg:1/6\",\n"
                   "             \"assoc:1/7,1/10\", \"assoc:1/10,1/20\", \"assoc:1/13,1/30\"]\n") +
           kThreeClassSizes +
           "replicates = 1000\nfull_replicates = 10000\nseed = 7\ncritical = \"both\"\n"},
  };
  return p;
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"table2", "table3", "power-seg-2cl", "power-assoc-2cl", "table-3cl-sizes", "power-3cl"};
}

std::string preset_config(const std::string& name) {
  const auto it = presets().find(name);
  if (it == presets().end()) throw InputError("unknown preset '" + name + "'");
  return it->second;
}

// ---------------------------------------------------------------- output

std::string csv_header(int q) {
  std::string h = "scenario,critical,replicates";
  for (int c = 1; c <= q; ++c) h += ",n" + std::to_string(c);
  for (const auto& s : all_selectors(q)) {
    const std::string n = s.name();
    h += "," + n + "_rate," + n + "_se," + n + "_flag";
  }
  return h;
}

std::string csv_row(const SizePowerRow& row) {
  std::string line = "\"" + row.scenario + "\"," + to_string(row.source) + "," +
                     std::to_string(row.replicates);
  for (long n : row.sizes) line += "," + std::to_string(n);
  for (const auto& r : row.rates) line += "," + fixed(r.rate, 6) + "," + fixed(r.se, 6) + "," + r.flag;
  return line;
}

void print_rows_table(std::ostream& os, const std::vector<SizePowerRow>& rows) {
  if (rows.empty()) return;
  // Two classes: nn1 = nn2 = overall, so only base1, base2, nn1 are shown.
  const int q = static_cast<int>(rows[0].sizes.size());
  std::vector<StatisticSelector> shown;
  if (q == 2) {
    shown = {{TestKind::base, 0}, {TestKind::base, 1}, {TestKind::nn, 0}};
  } else {
    for (int c = 0; c < q; ++c) shown.push_back({TestKind::base, c});
    for (int c = 0; c < q; ++c) shown.push_back({TestKind::nn, c});
    shown.push_back({TestKind::overall, 0});
  }
  std::string last;
  for (const auto& row : rows) {
    const std::string group = row.scenario + " / " + to_string(row.source);
    if (group != last) {
      os << "\n" << group << "\n" << std::left << std::setw(16) << "sizes";
      for (const auto& s : shown) os << std::setw(10) << s.name();
      os << "\n";
      last = group;
    }
    std::string sz = "(";
    for (std::size_t c = 0; c < row.sizes.size(); ++c) {
      sz += (c ? "," : "") + std::to_string(row.sizes[c]);
    }
    sz += ")";
    os << std::left << std::setw(16) << sz;
    for (const auto& s : shown) {
      const TestRate& r = row.rate(s);
      std::string cell = fixed(r.rate, 4);
      if (cell.rfind("0.", 0) == 0) cell.erase(0, 1);
      os << std::setw(10) << (cell + r.flag);
    }
    os << "\n";
  }
}

// ---------------------------------------------------------------- runner

namespace {

struct Checkpoint {
  std::size_t item = 0;
  std::size_t done = 0;
  std::vector<std::vector<long>> counts;
};

std::vector<std::string> read_lines(const std::string& path) {
  std::vector<std::string> lines;
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& cfg, const std::string& csv_path,
                         const RunOptions& opts) {
  cfg.validate();
  const std::string hash = cfg.spec_hash();
  const std::string ckpt_path = csv_path + ".ckpt";

  nlohmann::ordered_json meta;
  meta["tool"] = "segpoint";
  meta["version"] = kVersion;
  meta["seed"] = cfg.seed;
  meta["M"] = cfg.replicates;
  meta["spec_hash"] = hash;
  meta["spec"] = nlohmann::ordered_json::parse(cfg.canonical());
  const std::string meta_line = "# " + meta.dump();
  const int q = static_cast<int>(cfg.sizes[0].size());
  const std::string header = csv_header(q);

  std::vector<Item> items;
  for (std::size_t s = 0; s < cfg.scenarios.size(); ++s) {
    for (std::size_t z = 0; z < cfg.sizes.size(); ++z) {
      items.push_back({cfg.scenarios[s], cfg.sizes[z], s, z});
    }
  }
  const auto sources = cfg.sources();
  const auto sel = all_selectors(q);

  Harness h;
  h.master = cfg.seed;
  h.replicates = cfg.replicates;
  h.cv_replicates = cfg.cv_replicates == 0 ? cfg.replicates : cfg.cv_replicates;
  h.alpha = cfg.alpha;
  h.cv_quantile = cfg.cv_quantile;
  h.window = cfg.window;
  h.regenerate = cfg.regenerate_locations;
  h.flag_size = cfg.mode == "size";
  h.sources = sources;
  h.workers = opts.workers;

  // Restore state.
  std::vector<std::string> kept_rows;
  std::optional<Checkpoint> partial;
  if (opts.resume && std::filesystem::exists(csv_path)) {
    const auto lines = read_lines(csv_path);
    if (lines.size() < 2 || lines[0] != meta_line || lines[1] != header) {
      throw InputError("'" + csv_path +
                       "' was written by a different config; remove it or run without --resume");
    }
    const std::size_t complete = (lines.size() - 2) / sources.size();
    kept_rows.assign(lines.begin() + 2,
                     lines.begin() + 2 + static_cast<std::ptrdiff_t>(complete * sources.size()));
    for (const auto& l : read_lines(ckpt_path)) {
      json j;
      try {
        j = json::parse(l);
      } catch (const json::parse_error&) {
        continue;  // torn final line
      }
      if (j.value("hash", "") != hash || j.value("item", std::size_t{0}) != complete) continue;
      Checkpoint c;
      c.item = complete;
      c.done = j.at("done").get<std::size_t>();
      c.counts = j.at("counts").get<std::vector<std::vector<long>>>();
      partial = c;
    }
  }

  RunResult result;
  {
    std::ofstream out(csv_path, std::ios::trunc);
    if (!out) throw InputError("cannot write '" + csv_path + "'");
    out << meta_line << "\n" << header << "\n";
    for (const auto& r : kept_rows) out << r << "\n";
  }
  std::ofstream csv(csv_path, std::ios::app);
  std::ofstream ckpt(ckpt_path, partial || !kept_rows.empty() ? std::ios::app : std::ios::trunc);
  if (!ckpt) throw InputError("cannot write '" + ckpt_path + "'");

  std::size_t blocks_run = 0;
  const std::size_t first_item = kept_rows.size() / sources.size();
  for (std::size_t i = first_item; i < items.size(); ++i) {
    const Item& it = items[i];
    const Sampler sampler(h.spec_for(it), sel);
    const Thresholds th = h.thresholds(it, sel);
    std::vector<std::vector<long>> counts(sources.size(), std::vector<long>(sel.size(), 0));
    std::size_t done = 0;
    if (partial && partial->item == i) {
      counts = partial->counts;
      done = partial->done;
    }
    while (done < cfg.replicates) {
      if (opts.stop_after_blocks && blocks_run >= *opts.stop_after_blocks) return result;
      const std::size_t end = std::min(cfg.replicates, done + cfg.block);
      count_block(sampler, done, end, opts.workers, th, counts);
      done = end;
      ++blocks_run;
      json c;
      c["hash"] = hash;
      c["item"] = i;
      c["done"] = done;
      c["counts"] = counts;
      ckpt << c.dump() << "\n" << std::flush;
      if (opts.progress) {
        *opts.progress << "[" << i + 1 << "/" << items.size() << "] " << it.scenario << " "
                       << done << "/" << cfg.replicates << "\n";
      }
    }
    for (auto& row : h.rows(it, sel, counts)) {
      csv << csv_row(row) << "\n";
      result.rows.push_back(std::move(row));
    }
    csv.flush();
  }
  ckpt.close();
  std::filesystem::remove(ckpt_path);
  result.complete = true;
  return result;
}

}  // namespace segpoint

#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "segpoint/error.hpp"
#include "segpoint/io.hpp"
#include "segpoint/patterns.hpp"
#include "segpoint/report.hpp"

using namespace segpoint;

namespace {

std::string error_of(const std::string& csv) {
  try {
    parse_points_csv(csv, RectWindow::unit());
  } catch (const InputError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("point CSV parsing") {
  const auto s = parse_points_csv("x,y,label\n0.1,0.2,a\n0.3,0.4,b\n0.5,0.6,a\n", RectWindow::unit());
  CHECK(s.size() == 3);
  CHECK(s.num_classes() == 2);
  CHECK(s.class_sizes()[0] == 2);
  CHECK(s.class_sizes()[1] == 1);
  CHECK(s.class_names() == std::vector<std::string>{"a", "b"});

  // column order, case, CRLF and extra columns
  const auto t = parse_points_csv("Label,id,Y,X\r\nb,1,2,1\r\na,2,4,3\r\n");
  CHECK(t.class_names()[0] == "b");
  CHECK(t.points()[1] == Point2{3, 4});
}

TEST_CASE("bounding-box window warns") {
  std::vector<std::string> w;
  const auto s = parse_points_csv("x,y,label\n0,0,a\n2,1,b\n", std::nullopt, &w);
  CHECK(s.window() == RectWindow{0, 2, 0, 1});
  CHECK(w.size() == 1);
}

TEST_CASE("point CSV errors carry line numbers") {
  CHECK(error_of("x,y,label\n0.1,0.2,a\n0.3,zz,b\n").find("line 3") != std::string::npos);
  CHECK(error_of("x,y,label\n0.1,0.2,a\n0.3\n").find("line 3") != std::string::npos);
  CHECK(error_of("a,b,c\n1,2,3\n").find("line 1") != std::string::npos);
  CHECK(error_of("x,y,label\n0.1,0.2,a\n").find("at least 2") != std::string::npos);
  CHECK(error_of("x,y,label\n0.1,0.2,a\n0.3,0.2,a\n").find("2 classes") != std::string::npos);
  CHECK(error_of("x,y,label\n0.1,0.2,a\n1.3,0.2,b\n").find("outside") != std::string::npos);
  CHECK_THROWS_AS(load_points_csv("/nonexistent.csv"), InputError);
  CHECK_THROWS_AS(parse_window("0,1,0"), InputError);
  CHECK(parse_window("-1,2,0.5,3") == RectWindow{-1, 2, 0.5, 3});
}

TEST_CASE("save then load is the identity") {
  Rng rng(12);
  const RectWindow w{-1, 3, 2, 2.5};
  const auto s = gen_csr({17, 23, 5}, w, rng);
  const auto path = (std::filesystem::temp_directory_path() / "segpoint-roundtrip.csv").string();
  save_points_csv(path, s);
  const auto t = load_points_csv(path, w);
  REQUIRE(t.size() == s.size());
  for (std::size_t i = 0; i < s.size(); ++i) CHECK(t.points()[i] == s.points()[i]);
  CHECK(format_points_csv(t) == format_points_csv(s));
}

TEST_CASE("NNCT JSON") {
  const auto f = parse_nnct_json(R"({"names":["a","b"],"counts":[[3,1],[2,4]],"Q":6,"R":4})");
  CHECK(f.table()(1, 1) == 4);
  CHECK(parse_nnct_json(format_nnct_json(f)).counts == f.counts);
  CHECK_THROWS_AS(parse_nnct_json("{"), InputError);
  CHECK_THROWS_AS(parse_nnct_json(R"({"counts":[[1,2],[3]],"Q":0,"R":0})"), InputError);
  CHECK_THROWS_AS(parse_nnct_json(R"({"counts":[[1,-2],[3,1]],"Q":0,"R":0})"), InputError);
  CHECK_THROWS_AS(parse_nnct_json(R"({"counts":[[1,2],[3,1]],"Q":-1,"R":0})"), InputError);
}

TEST_CASE("number formatting") {
  CHECK(format_statistic(275.6412) == "275.64");
  CHECK(format_pvalue(0.13132) == ".1313");
  CHECK(format_pvalue(0.00009) == "<.0001");
  CHECK(format_pvalue(1.0) == "1.0000");
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
}

TEST_CASE("percentage tables sum to 100") {
  const auto f = load_nnct_json(SEGPOINT_DATA_DIR "/swamp.json");
  const Nnct t = f.table();
  for (const auto& row : row_percentages(t)) {
    double s = 0;
    for (double x : row) s += x;
    CHECK(s == doctest::Approx(100.0));
  }
  const auto cols = column_percentages(t);
  for (std::size_t j = 0; j < cols[0].size(); ++j) {
    double s = 0;
    for (const auto& row : cols) s += row[j];
    CHECK(s == doctest::Approx(100.0));
  }
}

TEST_CASE("analyze NNCT fixtures") {
  AnalysisRequest req;
  req.nnct = load_nnct_json(SEGPOINT_DATA_DIR "/leukemia.json");
  const auto r = analyze(req);
  const std::vector<std::string> want{"2.25", "1.44", "1.65", "2.25", "2.25"};
  REQUIRE(r.tests.size() == want.size());
  for (std::size_t i = 0; i < want.size(); ++i) CHECK(format_statistic(r.tests[i].statistic) == want[i]);

  AnalysisRequest sw;
  sw.nnct = load_nnct_json(SEGPOINT_DATA_DIR "/swamp.json");
  sw.percentages = true;
  const auto s = analyze(sw);
  const std::string text = format_report(s, OutputFormat::text);
  CHECK(text.find("275.64") != std::string::npos);
  CHECK(text.find("<.0001") != std::string::npos);
  CHECK(text.find(s.input_hash) != std::string::npos);
  const std::string csv = format_report(s, OutputFormat::csv);
  CHECK(csv.find("overall,\"overall\",275.635691") != std::string::npos);
  const std::string json = format_report(s, OutputFormat::json);
  CHECK(json.find("\"version\"") != std::string::npos);
  CHECK(json.find("row_percentages") != std::string::npos);
}

TEST_CASE("two classes: NN rows repeat the overall row") {
  Rng rng(4);
  AnalysisRequest req;
  req.points = gen_csr({25, 40}, RectWindow::unit(), rng);
  McConfig mc;
  mc.replicates = 99;
  mc.master_seed = 7;
  req.mc = mc;
  const auto r = analyze(req);
  REQUIRE(r.tests.size() == 5);
  CHECK(r.tests[3].statistic == doctest::Approx(r.tests[0].statistic));
  CHECK(r.tests[4].statistic == doctest::Approx(r.tests[0].statistic));
  CHECK(r.tests[0].p_mc.has_value());
  CHECK(r.tests[0].p_rand.has_value());
  CHECK(r.seed == std::optional<std::uint64_t>(7));

  // the same request twice gives the same report
  CHECK(format_report(analyze(req), OutputFormat::json) == format_report(r, OutputFormat::json));
}

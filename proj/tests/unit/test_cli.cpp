#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "rectfree/cli.hpp"
#include "rectfree/error.hpp"
#include "rectfree/series.hpp"

using namespace rectfree;
using namespace rectfree::cli;
using nlohmann::json;

namespace {

std::string data(const char* name) { return std::string(RECTFREE_DATA_DIR) + "/" + name; }

struct Output {
  int code;
  json doc;
  std::string csv;
  std::string err;
};

Output run_capture(const RunConfig& c) {
  std::ostringstream out, err;
  const int code = run(c, out, err);
  Output o{code, json(), "", err.str()};
  if (code == 0 || code == 1) {
    std::istringstream in(out.str());
    if (in.peek() == '{') {
      // The JSON document ends at the first line that is exactly "}".
      std::string line, text;
      while (std::getline(in, line)) {
        text += line + "\n";
        if (line == "}") break;
      }
      o.doc = json::parse(text);
      o.csv.assign(std::istreambuf_iterator<char>(in), {});
    }
  }
  return o;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

RunConfig config(const std::string& sub) {
  RunConfig c;
  c.subcommand = sub;
  return c;
}

}  // namespace

TEST_CASE("grid specifications") {
  const auto g = parse_grid("-2:2:5");
  CHECK(g.xmin == -2.0);
  CHECK(g.xmax == 2.0);
  CHECK(g.npts == 5);
  CHECK(g.points() == std::vector<double>{-2.0, -1.0, 0.0, 1.0, 2.0});
  CHECK_THROWS_AS(parse_grid("1:2"), ParseError);
  CHECK_THROWS_AS(parse_grid("a:2:3"), ParseError);
  CHECK_THROWS_AS(parse_grid("2:1:3"), ParseError);
  CHECK_THROWS_AS(parse_grid("0:1:1"), ParseError);
}

TEST_CASE("configuration validation") {
  auto c = config("moments");
  c.lambda = 1.5;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c.lambda = 0.5;
  c.order = 0;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c.order = 4;
  c.q1 = 400;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c.q1 = 100;
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("cumulants of all-ones moments") {
  auto c = config("cumulants");
  c.lambda = 0.3;
  c.order = 3;
  c.moments = {1.0, 1.0, 1.0};
  const auto o = run_capture(c);
  REQUIRE(o.code == 0);
  const auto k = o.doc.at("result").at("cumulants").get<std::vector<double>>();
  CHECK(k[0] == doctest::Approx(1.0));
  CHECK(k[1] == doctest::Approx(-0.3));
  CHECK(k[2] == doctest::Approx(0.18));
  CHECK(o.doc.at("config").at("lambda") == 0.3);
}

TEST_CASE("convolve") {
  auto c = config("convolve");
  c.inputs = {data("bernoulli.json"), data("bernoulli.json")};
  c.order = 4;
  const auto o = run_capture(c);
  REQUIRE(o.code == 0);
  const auto m = o.doc.at("result").at("moments").get<std::vector<double>>();
  const std::vector<double> ones(4, 1.0);
  auto k = series::cumulants_from_moments<double>(ones, 0.5, 4);
  for (auto& v : k) v *= 2.0;
  const auto want = series::moments_from_cumulants<double>(k, 0.5, 4);
  for (int i = 0; i < 4; ++i) CHECK(m[i] == doctest::Approx(want[i]).epsilon(1e-13));
  CHECK(m[0] == doctest::Approx(2.0));
  CHECK(m[1] == doctest::Approx(5.0));

  c.inputs = {data("uniform.json"), data("dirac0.json")};
  const auto id = run_capture(c);
  REQUIRE(id.code == 0);
  auto mc = config("moments");
  mc.inputs = {data("uniform.json")};
  mc.order = 4;
  const auto base = run_capture(mc);
  REQUIRE(base.code == 0);
  const auto a = id.doc.at("result").at("moments").get<std::vector<double>>();
  const auto b = base.doc.at("result").at("moments").get<std::vector<double>>();
  for (int i = 0; i < 4; ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));

  c.inputs = {data("uniform.json"), data("bernoulli.json")};
  c.lambda = 1.0;
  const auto sq = run_capture(c);
  REQUIRE(sq.code == 0);
  const auto rect = sq.doc.at("result").at("moments").get<std::vector<double>>();
  const auto free = sq.doc.at("result").at("free_route").get<std::vector<double>>();
  for (int i = 0; i < 4; ++i) CHECK(rect[i] == doctest::Approx(free[i]).epsilon(1e-12));

  c.lambda = 0.0;
  const auto zero = run_capture(c);
  REQUIRE(zero.code == 0);
  const auto l0 = zero.doc.at("result").at("lambda0_route").get<std::vector<double>>();
  const auto z = zero.doc.at("result").at("moments").get<std::vector<double>>();
  for (int i = 0; i < 4; ++i) CHECK(l0[i] == doctest::Approx(z[i]).epsilon(1e-10));
}

TEST_CASE("convolve with a density grid") {
  auto c = config("convolve");
  c.inputs = {data("bernoulli.json"), data("bernoulli.json")};
  c.grid = parse_grid("-2.2:2.2:45");
  const auto o = run_capture(c);
  CHECK(o.code == 0);
  CHECK(o.doc.at("result").at("density").at("flagged") == false);
  CHECK(o.csv.rfind("# config: ", 0) == 0);
  CHECK(o.csv.find("x,density\n") != std::string::npos);
}

TEST_CASE("density of a catalog family") {
  auto c = config("density");
  c.family = "rect_gaussian";
  c.params = {{"sigma2", 1.0}};
  c.grid = parse_grid("-2:2:4001");
  const auto o = run_capture(c);
  REQUIRE(o.code == 0);
  CHECK(o.doc.at("result").at("method") == "closed_form");
  // Integrate the CSV rows.
  std::istringstream in(o.csv);
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  CHECK(line == "x,density");
  std::vector<double> x, f;
  while (std::getline(in, line)) {
    const auto comma = line.find(',');
    x.push_back(std::stod(line.substr(0, comma)));
    f.push_back(std::stod(line.substr(comma + 1)));
  }
  REQUIRE(x.size() == 4001);
  double integral = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) integral += (x[i + 1] - x[i]) * (f[i] + f[i + 1]) / 2;
  CHECK(std::abs(integral - 1.0) < 1e-4);

  c.family = "nonsense";
  CHECK(run_capture(c).code == 2);
}

TEST_CASE("density of a transform-only family is marked as derived") {
  auto c = config("density");
  c.family = "rect_poisson";
  c.grid = parse_grid("0:6:25");
  const auto o = run_capture(c);
  CHECK(o.doc.at("result").at("derived_not_closed_form") == true);
  CHECK(o.doc.at("result").at("method") == "recovered");
  CHECK(o.code == (o.doc.at("result").at("flagged").get<bool>() ? 1 : 0));
}

TEST_CASE("catalog") {
  const auto o = run_capture(config("catalog"));
  REQUIRE(o.code == 0);
  CHECK(o.doc.at("result").at("families").size() == 5);
  CHECK(o.doc.at("ok") == true);
}

TEST_CASE("Monte Carlo command") {
  auto c = config("mc");
  c.inputs = {data("bernoulli.json"), data("bernoulli.json")};
  c.q1 = 150;
  c.q2 = 300;
  c.trials = 50;
  c.seed = 42;
  c.bins = 40;
  const auto o = run_capture(c);
  REQUIRE(o.code == 0);
  const auto& m2 = o.doc.at("result").at("moments")[0];
  CHECK(m2.at("order") == 2);
  CHECK(std::abs(m2.at("z_score").get<double>()) < 3.0);
  CHECK(m2.at("predicted").get<double>() == doctest::Approx(2.0));
  CHECK(o.csv.find("bin_center,mass\n") != std::string::npos);
}

TEST_CASE("outputs are byte-identical and embed the configuration") {
  const auto dir = std::filesystem::temp_directory_path() / "rectfree_cli_test";
  std::filesystem::create_directories(dir);
  auto c = config("mc");
  c.inputs = {data("bernoulli.json"), data("uniform.json")};
  c.q1 = 20;
  c.q2 = 50;
  c.trials = 5;
  c.bins = 10;
  std::ostringstream out, err;
  c.out = (dir / "a.json").string();
  REQUIRE(run(c, out, err) == 0);
  c.out = (dir / "b.json").string();
  REQUIRE(run(c, out, err) == 0);
  CHECK(slurp(dir / "a.json") == slurp(dir / "b.json"));
  CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
  const auto doc = json::parse(slurp(dir / "a.json"));
  CHECK(doc.at("config").at("seed") == 42);
  CHECK(doc.at("config").at("inputs").size() == 2);
  CHECK(slurp(dir / "a.csv").rfind("# config: ", 0) == 0);

  c.out = (dir / "missing" / "x.json").string();
  CHECK(run(c, out, err) == 1);
  std::filesystem::remove_all(dir);
}

TEST_CASE("exit codes") {
  auto c = config("moments");
  c.inputs = {"/nonexistent.json"};
  CHECK(run_capture(c).code == 2);

  c.inputs = {data("bernoulli.json")};
  c.lambda = 2.0;
  CHECK(run_capture(c).code == 2);

  auto unknown = config("frobnicate");
  CHECK(run_capture(unknown).code == 2);

  auto cum = config("cumulants");
  CHECK(run_capture(cum).code == 2);

  auto trace = config("trace");
  CHECK(run_capture(trace).code == 2);
  trace.word = "M1* M2 M1* M2";
  trace.q1 = 5;
  trace.q2 = 30;
  trace.trials = 3;
  const auto t = run_capture(trace);
  CHECK(t.code == 0);
  CHECK(t.doc.at("result").at("lambda1_prediction") == 0.0);

  // A flagged recovery is a failure: the grid misses most of the mass.
  auto d = config("density");
  d.family = "bernoulli_conv";
  d.recover = true;
  d.grid = parse_grid("0:0.3:7");
  CHECK(run_capture(d).code == 1);
}

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fracholder/error.hpp"
#include "fracholder/experiments.hpp"

using namespace fracholder;

namespace {

const char* kSolve = R"([experiment]
kind = solve
name = small
[domain]
shape = ball([0], 1)
[solver]
s = 1/2
h = 1/64
[data]
set = segment([1], [2])
oracle = on
)";

const char* kDecay = R"([experiment]
kind = decay
[domain]
shape = ball([0], 1)
[solver]
s = 1/2
h = 1/128
[probes]
anchors = [[1], [-1]]
)";

Json without_timestamp(Json j) {
  j.erase("timestamp");
  return j;
}

}  // namespace

TEST_CASE("small solve run reports tagged checks") {
  const ExperimentConfig c = parse_config(kSolve);
  const Outcome o = run_experiment(c);
  CHECK(o.passed);
  CHECK(o.report["config_hash"] == config_hash(c));
  REQUIRE(o.report["checks"].size() >= 3);
  for (const auto& chk : o.report["checks"]) {
    CHECK(chk["config_hash"] == config_hash(c));
    CHECK(chk.contains("pass"));
  }
  CHECK(o.report["results"]["sup_error"].get<double>() < 0.02);
  CHECK(o.timing["config_hash"] == config_hash(c));
  for (const auto& t : o.tables) {
    REQUIRE(t.columns.size() >= 3);
    CHECK(t.columns[0] == "config_hash");
    CHECK(t.columns[1] == "h");
    CHECK(t.columns[2] == "solver_tolerance");
    for (const auto& r : t.rows) CHECK(r.size() == t.columns.size());
  }
}

TEST_CASE("a tight oracle threshold fails the run") {
  const ExperimentConfig c = parse_config(std::string(kSolve) + "[thresholds]\noracle = 1e-6\n");
  CHECK_FALSE(run_experiment(c).passed);
}

TEST_CASE("runs are deterministic across thread counts") {
  const ExperimentConfig c = parse_config(kDecay);
  const Outcome a = run_experiment(c, {1, true});
  const Outcome b = run_experiment(c, {3, true});
  CHECK(without_timestamp(a.report).dump() == without_timestamp(b.report).dump());
  REQUIRE(a.tables.size() == b.tables.size());
  for (std::size_t k = 0; k < a.tables.size(); ++k) CHECK(render_csv(a.tables[k]) == render_csv(b.tables[k]));
}

TEST_CASE("outcome files are written") {
  const auto dir = std::filesystem::temp_directory_path() / "fracholder_outcome_test";
  std::filesystem::remove_all(dir);
  const Outcome o = run_experiment(parse_config(kDecay));
  write_outcome(o, dir.string(), true);
  CHECK(std::filesystem::exists(dir / "report.json"));
  CHECK(std::filesystem::exists(dir / "timing.json"));
  for (const auto& t : o.tables) CHECK(std::filesystem::exists(dir / t.file));
  for (const auto& p : o.plots) CHECK(std::filesystem::exists(dir / p.file));
  std::ifstream in(dir / "report.json");
  const Json back = Json::parse(in);
  CHECK(back["passed"] == o.passed);
  std::filesystem::remove_all(dir);
}

TEST_CASE("csv quoting") {
  Table t{"x.csv", {"a", "b"}, {{"plain", "with,comma"}, {"say \"hi\"", "1"}}};
  CHECK(render_csv(t) == "a,b\nplain,\"with,comma\"\n\"say \"\"hi\"\"\",1\n");
}

TEST_CASE("svg rendering") {
  Plot p{"p.svg", "decay", "r", "omega", true, true, {{"fit", {0.1, 0.2, 0.4}, {0.3, 0.4, 0.55}, false}}};
  const std::string svg = render_svg(p);
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(svg.find("fit") != std::string::npos);
}

TEST_CASE("indicator data on the line") {
  const ExteriorFunction f = indicator_function_1d(Shape::segment({1, 0}, {2, 0}, 1));
  CHECK(f.value({1.5, 0}) == 1.0);
  CHECK(f.value({2.5, 0}) == 0.0);
  REQUIRE(f.breaks.size() == 2);
  CHECK(f.breaks[0] == 1.0);
  CHECK(f.breaks[1] == 2.0);
}

TEST_CASE("parallel_for covers every index and rethrows") {
  std::vector<int> hit(37, 0);
  parallel_for(4, hit.size(), [&](std::size_t k) { hit[k] += 1; });
  for (int v : hit) CHECK(v == 1);
  CHECK_THROWS_AS(parallel_for(3, 10, [](std::size_t k) {
                    if (k == 6) throw Error(ErrorCode::ConfigInvalid, "boom");
                  }),
                  Error);
}

TEST_CASE("number formatting round trips") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 12345.0}) CHECK(std::stod(format_number(v)) == v);
}

#include <doctest.h>

#include <fstream>
#include <sstream>
#include <string>

#include "fracholder/config.hpp"
#include "fracholder/error.hpp"

using namespace fracholder;

namespace {

const char* kSolve = R"(# comment
[experiment]
kind = solve
name = probe

[domain]
shape = ball([0], 1)

[solver]
s = 1/2
h = 1/64

[data]
set = segment([1], [2])
oracle = on
)";

std::string diagnostic(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ConfigInvalid);
    return e.what();
  }
  FAIL("expected ConfigInvalid");
  return {};
}

std::string replaced(std::string text, const std::string& from, const std::string& to) {
  text.replace(text.find(from), from.size(), to);
  return text;
}

}  // namespace

TEST_CASE("expressions") {
  CHECK(parse_number("1/4 + 2*3") == doctest::Approx(6.25));
  CHECK(parse_number("-(1/2)") == doctest::Approx(-0.5));
  CHECK(parse_number("pi") == doctest::Approx(std::acos(-1.0)));
  CHECK(std::isinf(parse_number("inf")));
  CHECK(parse_number_list("[1/8, 1/4, 1]") == std::vector<double>{0.125, 0.25, 1.0});
  const auto pts = parse_points("[[1, 0], [-1, 0.5]]", 2);
  REQUIRE(pts.size() == 2);
  CHECK(pts[1][1] == 0.5);
  CHECK(parse_points("[1]", 1).size() == 1);
  const auto b = as_ball("ball([0, 0], 2)");
  REQUIRE(b.has_value());
  CHECK(b->radius == 2.0);
  CHECK_FALSE(as_ball("box([0], [1])").has_value());
  CHECK_THROWS_AS(parse_number("1 +"), Error);
  CHECK_THROWS_AS(parse_shape("ball([0], -1)"), Error);
  CHECK_THROWS_AS(parse_shape("blob([0], 1)"), Error);
}

TEST_CASE("shapes from expressions") {
  const Shape s = parse_shape("union(ball([0], 1), complement(halfspace([-1], -3)))");
  CHECK(s.contains({0.5, 0}));
  CHECK(s.contains({3, 0}));
  CHECK_FALSE(s.contains({2, 0}));
  const Shape seg = parse_shape("segment([1], [2])");
  CHECK(seg.contains({1, 0}));
  CHECK_FALSE(parse_shape("box([1], [2])").contains({1, 0}));
}

TEST_CASE("a complete config parses") {
  const ExperimentConfig c = parse_config(kSolve);
  CHECK(c.kind == ExperimentKind::Solve);
  CHECK(c.dim == 1);
  CHECK(c.s == 0.5);
  CHECK(c.h == 1.0 / 64);
  CHECK(c.oracle);
  CHECK(config_hash(c).size() == 64);
}

TEST_CASE("canonical form ignores layout and output") {
  const ExperimentConfig a = parse_config(kSolve);
  std::string shuffled = replaced(kSolve, "name = probe", "name   =   probe");
  shuffled += "\n[output]\ndir = elsewhere\n";
  const ExperimentConfig b = parse_config(shuffled);
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a) != config_hash(parse_config(replaced(kSolve, "h = 1/64", "h = 1/128"))));
}

TEST_CASE("diagnostics carry line numbers") {
  CHECK(diagnostic("").find("experiment.kind") != std::string::npos);
  CHECK(diagnostic(replaced(kSolve, "s = 1/2", "sigma = 1/2")).find("line 10") != std::string::npos);
  CHECK(diagnostic(replaced(kSolve, "[data]", "[dta]")).find("line 13") != std::string::npos);
  CHECK(diagnostic(replaced(kSolve, "h = 1/64", "h = 1/64\nh = 1/32")).find("line 12") != std::string::npos);
  CHECK(diagnostic(replaced(kSolve, "s = 1/2", "s = 3/2")).find("line 10") != std::string::npos);
  CHECK(diagnostic(replaced(kSolve, "kind = solve", "kind = dance")).find("line 3") != std::string::npos);
  CHECK(diagnostic(replaced(kSolve, "shape = ball([0], 1)", "shape = ball([0], 1")).find("line 7") !=
        std::string::npos);
  CHECK(diagnostic(replaced(kSolve, "set = segment([1], [2])\n", "")).find("set") != std::string::npos);
}

TEST_CASE("solve oracle needs a ball") {
  CHECK_THROWS_AS(parse_config(replaced(kSolve, "ball([0], 1)", "box([-1], [1])")), Error);
}

TEST_CASE("catalog entries parse") {
  const auto& cat = domain_catalog();
  CHECK(cat.size() >= 6);
  for (const auto& e : cat) {
    const Shape s = parse_shape(e.expression);
    CHECK(s.dim() == e.dim);
  }
}

TEST_CASE("shipped configs load") {
  for (const char* name : {"interval_solve", "interval_measure", "capacity_scaling", "disk_fatness", "interval_decay",
                           "interval_holder", "interval_cs", "suite_interval", "suite_punctured", "suite_disk",
                           "suite_slit"}) {
    CAPTURE(name);
    CHECK_NOTHROW(load_config(std::string(FRACHOLDER_SOURCE_DIR) + "/configs/" + name + ".ini"));
  }
}

TEST_CASE("sha256 of a known string") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

#include <doctest.h>

#include <cmath>

#include "fracholder/capacity.hpp"
#include "fracholder/error.hpp"

using namespace fracholder;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::ConfigInvalid;
}

}  // namespace

TEST_CASE("empty condenser has zero capacity") {
  const CapacityResult r = besov_capacity(Shape::closed_ball({0.01, 0}, 0.001, 1), Ball{{0, 0}, 1}, 1.0 / 16, 0.5);
  CHECK(r.empty_k);
  CHECK(r.value == 0.0);
}

TEST_CASE("condenser geometry is validated") {
  CHECK(code_of([] { besov_capacity(Shape::halfspace({1, 0}, 0, 1), Ball{{0, 0}, 1}, 0.125, 0.5); }) ==
        ErrorCode::GeometryViolation);
  CHECK(code_of([] { besov_capacity(Shape::closed_ball({3, 0}, 0.5, 1), Ball{{0, 0}, 1}, 0.125, 0.5); }) ==
        ErrorCode::GeometryViolation);
  CHECK(code_of([] { besov_capacity(Shape::closed_ball({0, 0}, 1.0, 2), Ball{{0, 0}, 1}, 0.125, 0.5); }) ==
        ErrorCode::GeometryViolation);
}

TEST_CASE("capacity is monotone in the condenser and its potential lies in [0, 1]") {
  const Ball B{{0, 0}, 1};
  double previous = 0.0;
  for (double r : {0.125, 0.25, 0.5}) {
    const CapacityResult c = besov_capacity(Shape::closed_ball({0, 0}, r, 1), B, 1.0 / 64, 0.5);
    CHECK(c.value > previous);
    previous = c.value;
    for (double v : c.potential.values) {
      CHECK(v >= -1e-10);
      CHECK(v <= 1.0 + 1e-10);
    }
    CHECK(c.residual < 1e-7);
  }
}

TEST_CASE("capacity scales like r^(N - 2s) in 1D") {
  std::vector<double> radii{0.125, 0.25, 0.5, 1.0}, caps;
  for (double r : radii) caps.push_back(besov_capacity(Shape::closed_ball({0, 0}, 0.5 * r, 1), Ball{{0, 0}, 2 * r}, 1.0 / 256, 0.25).value);
  for (std::size_t k = 1; k < radii.size(); ++k) {
    const double slope = std::log(caps[k] / caps[k - 1]) / std::log(2.0);
    CHECK(slope == doctest::Approx(0.5).epsilon(0.1));
  }
}

TEST_CASE("weighted capacity is comparable to the Besov capacity") {
  const Shape K = Shape::closed_ball({0, 0}, 0.25, 1);
  const Ball B{{0, 0}, 1};
  const double b = besov_capacity(K, B, 1.0 / 64, 0.5).value;
  const CapacityResult w = weighted_capacity(K, B, 1.0 / 64, 0.5);
  CHECK(w.value > 0.0);
  CHECK(w.value / b > 0.2);
  CHECK(w.value / b < 5.0);
  for (double v : w.potential.values) {
    CHECK(v >= -1e-10);
    CHECK(v <= 1.0 + 1e-10);
  }
}

TEST_CASE("fatness ratio of a full ball is one") {
  CHECK(fatness_ratio({0, 0}, Shape::closed_ball({0, 0}, 2, 1), 0.5, 1.0 / 32, 0.5) == doctest::Approx(1.0));
}

TEST_CASE("fatness scan separates a fat exterior from a puncture") {
  const Shape interval = Shape::ball({0, 0}, 1, 1);
  const FatnessReport fat = fatness_scan(Shape::complement(interval), {{1, 0}, {-1, 0}}, {0.125, 0.25}, 0.5);
  CHECK(fat.fat);
  CHECK(fat.min_psi > 0.3);
  CHECK(fat.entries.size() == 4);

  const Shape punct = Shape::punctured_ball({0, 0}, 1, 0, 1);
  const FatnessReport thin = fatness_scan(Shape::complement(punct), {{0, 0}}, {0.125, 0.25}, 0.25);
  CHECK_FALSE(thin.fat);
  for (const auto& e : thin.entries) {
    CHECK(e.vanishing);
    CHECK(e.psi == 0.0);
    for (std::size_t l = 1; l < e.psi_levels.size(); ++l) CHECK(e.psi_levels[l] < e.psi_levels[l - 1]);
  }
  CHECK(code_of([&] { fatness_scan(Shape::complement(interval), {{0, 0}}, {0.25}, 0.5); }) ==
        ErrorCode::GeometryViolation);
}

TEST_CASE("perfectness on annuli") {
  const Shape outside = Shape::complement(Shape::ball({0, 0}, 1, 2));
  const auto ok = perfectness_check(outside, {{1, 0}}, {0.5, 0.25, 0.125}, 0.25, 1.0 / 16);
  CHECK(ok == std::vector<bool>{true});
  const auto lone = perfectness_check(Shape::closed_ball({0, 0}, 0, 2), {{0, 0}}, {0.25}, 0.25, 1.0 / 16);
  CHECK(lone == std::vector<bool>{false});
  CHECK_THROWS_AS(perfectness_check(outside, {{1, 0}}, {0.5}, 1.5, 0.1), Error);
}

TEST_CASE("trivial points") {
  const TrivialPointVerdict punct = trivial_point_test(Shape::punctured_ball({0, 0}, 1, 0, 1), {0, 0}, 0.25, 0.25);
  CHECK(punct.is_trivial);
  REQUIRE(punct.capacity.size() == 3);
  const TrivialPointVerdict end = trivial_point_test(Shape::ball({0, 0}, 1, 1), {1, 0}, 0.25, 0.25);
  CHECK_FALSE(end.is_trivial);
}

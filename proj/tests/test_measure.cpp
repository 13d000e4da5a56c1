#include <doctest.h>

#include <cmath>

#include "fracholder/error.hpp"
#include "fracholder/measure.hpp"

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

const Shape kInterval = Shape::ball({0, 0}, 1, 1);

GridPtr interval_grid(double h) { return build_grid(make_domain(kInterval), h); }

}  // namespace

TEST_CASE("far field of exterior sets") {
  const Box box{1, {-4, 0}, {4, 0}};
  const FarField right = far_field_of(Shape::halfspace({1, 0}, 1, 1), box);
  CHECK(right.negative == 0.0);
  CHECK(right.positive == 1.0);
  CHECK(far_field_of(Shape::complement(kInterval), box) == FarField::uniform(1.0));
  CHECK(far_field_of(Shape::box({1, 0}, {2, 0}, 1), box) == FarField::uniform(0.0));
  const Box plane{2, {-4, -4}, {4, 4}};
  CHECK(code_of([&] { far_field_of(Shape::halfspace({0, 1}, 0, 2), plane); }) == ErrorCode::UnsupportedFarField);
}

TEST_CASE("harmonic measure of the whole complement is one") {
  const GridPtr g = interval_grid(1.0 / 64);
  const NonlocalForm form = assemble(g, 0.5);
  const Field w = harmonic_measure(form, Shape::complement(kInterval));
  for (auto n : g->interior()) CHECK(w[n] == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("harmonic measure rejects sets meeting the domain") {
  const GridPtr g = interval_grid(1.0 / 16);
  const NonlocalForm form = assemble(g, 0.5);
  CHECK(code_of([&] { harmonic_measure(form, Shape::halfspace({1, 0}, 0, 1)); }) == ErrorCode::GNotInComplement);
}

TEST_CASE("symmetry and complementation on the interval") {
  const GridPtr g = interval_grid(1.0 / 64);
  const NonlocalForm form = assemble(g, 0.25);
  const Shape right = Shape::intersect(Shape::complement(kInterval), Shape::halfspace({1, 0}, 0, 1));
  const Shape left = Shape::intersect(Shape::complement(kInterval), Shape::halfspace({-1, 0}, 0, 1));
  const Field wr = harmonic_measure(form, right);
  const Field wl = harmonic_measure(form, left);
  const auto& lat = g->lattice();
  for (auto n : g->interior()) {
    const auto [i, j] = lat.index(n);
    const std::size_t mirror = lat.flat(lat.count[0] - 1 - i, j);
    CHECK(wr[n] == doctest::Approx(wl[mirror]).epsilon(1e-9));
    CHECK(wr[n] + wl[n] == doctest::Approx(1.0).epsilon(1e-9));
  }
  CHECK(complementation_residual(form, right) < 1e-7);
}

TEST_CASE("decay fit recovers an exact power law") {
  DecaySamples s;
  for (double r : {0.5, 0.25, 0.125}) {
    for (double q : kProbeFractions) s.samples.push_back({r, q * r, 1.7 * std::pow(q, 0.35)});
  }
  const DecayFit fit = fit_decay(s);
  CHECK(fit.exponent == doctest::Approx(0.35).epsilon(1e-12));
  CHECK(fit.constant == doctest::Approx(1.7).epsilon(1e-12));
  CHECK(fit.residual < 1e-12);
  CHECK(fit.count == 9);
}

TEST_CASE("decay fit sample requirements") {
  DecaySamples few;
  for (int k = 0; k < 5; ++k) few.samples.push_back({1.0, 0.1 * (k + 1), 0.5});
  CHECK(code_of([&] { fit_decay(few); }) == ErrorCode::InsufficientSamples);
  DecaySamples tiny;
  for (int k = 0; k < 8; ++k) tiny.samples.push_back({1.0, 0.1 * (k + 1), 1e-12});
  CHECK(code_of([&] { fit_decay(tiny); }) == ErrorCode::InsufficientSamples);
  DecaySamples flat;
  for (int k = 0; k < 8; ++k) flat.samples.push_back({1.0, 0.1 * (k + 1), 0.5});
  CHECK(code_of([&] { fit_decay(flat); }) == ErrorCode::DegenerateSamples);
}

TEST_CASE("dyadic radii and radius checks") {
  const auto r = dyadic_radii(2.0, 4);
  REQUIRE(r.size() == 4);
  CHECK(r[0] == doctest::Approx(0.5));
  CHECK(r[3] == doctest::Approx(0.0625));
  const GridPtr g = interval_grid(1.0 / 32);
  const NonlocalForm form = assemble(g, 0.5);
  CHECK(code_of([&] { ghmd_samples(form, {1, 0}, {1.5}); }) == ErrorCode::RadiusTooLarge);
  CHECK(code_of([&] { lhmd_samples(g, 0.5, {1, 0}, {1.5}); }) == ErrorCode::RadiusTooLarge);
}

TEST_CASE("probe ring over interior nodes") {
  const GridPtr g = interval_grid(1.0 / 8);
  Field f = make_field(g, [](const Point& p) { return p[0]; });
  const DecaySample smp = probe_ring(f, {1, 0}, 0.25);
  CHECK(smp.value == doctest::Approx(0.75));
  CHECK(smp.d == doctest::Approx(0.25));
  const DecaySample far = probe_ring(f, {1, 0}, 5.0);
  CHECK(far.value == doctest::Approx(-0.875));
}

TEST_CASE("local decay on the interval follows the boundary profile") {
  const GridPtr g = interval_grid(1.0 / 128);
  const DecaySamples s = lhmd_samples(g, 0.5, {1, 0});
  const DecayFit fit = fit_decay(s);
  CHECK(fit.exponent > 0.42);
  CHECK(fit.exponent < 0.58);
  for (const auto& smp : s.samples) {
    CHECK(smp.value >= 0.0);
    CHECK(smp.value <= 1.0);
  }
}

#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "fracholder/error.hpp"
#include "fracholder/extension.hpp"

using namespace fracholder;

namespace {

Eigen::VectorXd stiffness_times(const WeightedForm& form, const std::vector<double>& v) {
  return form.stiffness * Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

TEST_CASE("four-node stiffness assembled by hand") {
  const double s = 0.25, theta = 0.5;
  ExtensionGrid eg;
  eg.base = classify(make_lattice(Box{1, {0, 0}, {1, 0}}, 1.0), Shape::ball({5, 0}, 1, 1));
  eg.s = s;
  eg.theta = theta;
  eg.axes[0] = {0.0, 1.0};
  eg.axes[1] = {0.0};
  eg.t = {0.0, 1.0};
  eg.layer_weight = {std::pow(0.5, 1.5) / 1.5 / 0.5, (1.0 - std::pow(0.5, 1.5)) / 1.5 / 0.5};
  const WeightedForm form = assemble_weighted(eg);

  // Links: lateral in each layer (dual height 1/2), normal at each column (dual width 1/2).
  const double lat0 = 2.0 * eg.layer_weight[0] * 0.5;
  const double lat1 = 2.0 * eg.layer_weight[1] * 0.5;
  const double nrm = 2.0 * 0.5 * (1.0 - theta);
  Eigen::Matrix4d K;
  K << lat0 + nrm, -lat0, -nrm, 0,
       -lat0, lat0 + nrm, 0, -nrm,
       -nrm, 0, lat1 + nrm, -lat1,
       0, -nrm, -lat1, lat1 + nrm;
  const Eigen::MatrixXd dense = Eigen::MatrixXd(form.stiffness);
  CHECK((dense - K).cwiseAbs().maxCoeff() < 1e-14);

  const std::vector<double> v{0.3, -1.0, 2.0, 0.5};
  const Eigen::Vector4d ev(v.data());
  CHECK(weighted_energy(form, v) == doctest::Approx(ev.dot(K * ev)).epsilon(1e-13));
}

TEST_CASE("theta = 0 gives the standard Laplacian: x^2 - t^2 is discretely harmonic") {
  const GridPtr base = build_grid(make_domain(Shape::ball({0, 0}, 1, 1)), 0.25, 2.0);
  const ExtensionGrid eg = build_extension_grid(base, 0.5, 2.0, 8, 1.0);
  REQUIRE(eg.theta == doctest::Approx(0.0));
  const WeightedForm form = assemble_weighted(eg);
  std::vector<double> v(eg.size());
  for (std::size_t k = 0; k < eg.t.size(); ++k) {
    for (std::size_t i = 0; i < eg.nx(); ++i) v[eg.flat(i, 0, k)] = std::pow(eg.axes[0][i], 2) - std::pow(eg.t[k], 2);
  }
  const Eigen::VectorXd r = stiffness_times(form, v);
  for (std::size_t k = 0; k + 1 < eg.t.size(); ++k) {
    for (std::size_t i = 1; i + 1 < eg.nx(); ++i) CHECK(std::abs(r[eg.flat(i, 0, k)]) < 1e-12);
  }
}

TEST_CASE("t^(1 - theta) is discretely harmonic on graded layers") {
  for (double s : {0.25, 0.5, 0.75}) {
    const GridPtr base = build_grid(make_domain(Shape::ball({0, 0}, 1, 2)), 0.5, 2.0);
    const ExtensionGrid eg = make_extension_grid(base, s);
    const WeightedForm form = assemble_weighted(eg);
    std::vector<double> v(eg.size());
    for (std::size_t k = 0; k < eg.t.size(); ++k) {
      for (std::size_t p = 0; p < eg.layer_size(); ++p) v[k * eg.layer_size() + p] = std::pow(eg.t[k], 1.0 - eg.theta);
    }
    const Eigen::VectorXd r = stiffness_times(form, v);
    const double scale = r.cwiseAbs().maxCoeff();
    REQUIRE(scale > 0.0);
    for (std::size_t k = 1; k + 1 < eg.t.size(); ++k) {
      for (std::size_t p = 0; p < eg.layer_size(); ++p) CHECK(std::abs(r[k * eg.layer_size() + p]) < 1e-10 * scale);
    }
  }
}

TEST_CASE("stiffness is symmetric with zero row sums") {
  const GridPtr base = build_grid(make_domain(Shape::ball({0, 0}, 1, 2)), 0.5, 2.0);
  const ExtensionGrid eg = make_extension_grid(base, 0.3);
  const WeightedForm form = assemble_weighted(eg);
  const Eigen::SparseMatrix<double> diff = form.stiffness - Eigen::SparseMatrix<double>(form.stiffness.transpose());
  CHECK(diff.norm() < 1e-12 * form.stiffness.norm());
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(eg.size()));
  CHECK((form.stiffness * ones).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("constrained solve balances a single free node") {
  ExtensionGrid eg;
  eg.base = classify(make_lattice(Box{1, {0, 0}, {2, 0}}, 1.0), Shape::ball({5, 0}, 1, 1));
  eg.s = 0.5;
  eg.theta = 0.0;
  eg.axes[0] = {0.0, 1.0, 2.0};
  eg.axes[1] = {0.0};
  eg.t = {0.0, 1.0};
  eg.layer_weight = {1.0, 1.0};
  const WeightedForm form = assemble_weighted(eg);
  std::vector<char> fixed(eg.size(), 1);
  fixed[eg.flat(1, 0, 0)] = 0;
  std::vector<double> values{1.0, 0.0, 3.0, 5.0, 7.0, 9.0};
  const ExtensionField u = solve_constrained(form, fixed, values);
  // Neighbours x = 0, 2 (lateral, dual height 1/2) and t = 1 (normal, dual width 1).
  const double expected = (0.5 * 1.0 + 0.5 * 3.0 + 1.0 * 7.0) / 2.0;
  CHECK(u.values[eg.flat(1, 0, 0)] == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("extension trace matches the direct solve") {
  const GridPtr g = build_grid(make_domain(Shape::ball({0, 0}, 1, 1)), 1.0 / 32);
  const Field data = exterior_data(g, [](const Point& p) { return p[0] >= 1.0 - 1e-12 ? 1.0 : 0.0; });
  const CsReport rep = cs_consistency(g, 0.5, data, FarField{0.0, 1.0});
  CHECK(rep.sup_error < 0.05);
  CHECK(rep.l2_error <= rep.sup_error * std::sqrt(2.0));
  CHECK(rep.height == doctest::Approx(8.0 * g->diameter()).epsilon(1e-9));
  CHECK(rep.layers >= 4);
}

TEST_CASE("extension errors") {
  const GridPtr g = build_grid(make_domain(Shape::ball({0, 0}, 1, 1)), 1.0 / 8);
  const ExtensionGrid eg = make_extension_grid(g, 0.5);
  const WeightedForm form = assemble_weighted(eg);
  const GridPtr other = build_grid(make_domain(Shape::ball({0, 0}, 1, 1)), 1.0 / 16);
  CHECK_THROWS_AS(solve_extension(form, exterior_data(other, [](const Point&) { return 0.0; }), {}), Error);
  CHECK_THROWS_AS(solve_constrained(form, std::vector<char>(3, 0), std::vector<double>(3, 0.0)), Error);
}

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fracholder/capacity.hpp"
#include "fracholder/config.hpp"
#include "fracholder/error.hpp"
#include "fracholder/experiments.hpp"
#include "fracholder/measure.hpp"
#include "fracholder/oracle.hpp"

namespace py = pybind11;
using namespace fracholder;

namespace {

Point to_point(const std::vector<double>& p) {
  if (p.empty() || p.size() > 2) throw Error(ErrorCode::InvalidGeometry, "points have one or two coordinates");
  return {p[0], p.size() > 1 ? p[1] : 0.0};
}

/// Node coordinates, interior mask and values of a solved field.
py::dict field_dict(const Field& u) {
  const Grid& g = *u.grid;
  const auto n = static_cast<py::ssize_t>(g.size());
  const int dim = g.dim();
  py::array_t<double> nodes({n, static_cast<py::ssize_t>(dim)});
  py::array_t<double> values(n);
  py::array_t<bool> interior(n);
  auto N = nodes.mutable_unchecked<2>();
  auto V = values.mutable_unchecked<1>();
  auto I = interior.mutable_unchecked<1>();
  for (py::ssize_t k = 0; k < n; ++k) {
    const Point p = g.node(static_cast<std::size_t>(k));
    for (int d = 0; d < dim; ++d) N(k, d) = p[d];
    V(k) = u[static_cast<std::size_t>(k)];
    I(k) = g.is_interior(static_cast<std::size_t>(k));
  }
  py::dict out;
  out["h"] = g.h();
  out["nodes"] = nodes;
  out["values"] = values;
  out["interior"] = interior;
  return out;
}

GridPtr grid_for(const std::string& domain, double h, double dilation) {
  return build_grid(make_domain(parse_shape(domain)), h, dilation);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Nonlocal Dirichlet problems, harmonic measure and capacities on lattices";

  py::register_exception<Error>(m, "FracholderError", PyExc_RuntimeError);

  py::class_<Shape>(m, "Shape")
      .def("contains", [](const Shape& s, const std::vector<double>& p) { return s.contains(to_point(p)); })
      .def("describe", &Shape::describe)
      .def_property_readonly("dim", &Shape::dim)
      .def("__repr__", [](const Shape& s) { return "Shape(" + s.describe() + ")"; });

  m.def("parse_shape", &parse_shape, py::arg("expression"));

  m.def(
      "solve_dirichlet",
      [](const std::string& domain, double s, double h, const std::string& data_set, double dilation) {
        const GridPtr g = grid_for(domain, h, dilation);
        const Shape G = parse_shape(data_set);
        const NonlocalForm form = assemble(g, s);
        const Field data = exterior_data(g, [&](const Point& p) { return G.contains(p) ? 1.0 : 0.0; });
        return field_dict(solve_dirichlet(form, data, far_field_of(G, g->lattice().box())));
      },
      py::arg("domain"), py::arg("s"), py::arg("h"), py::arg("data_set"), py::arg("dilation") = 4.0,
      "Solves with exterior data the indicator of `data_set`.");

  m.def(
      "harmonic_measure",
      [](const std::string& domain, const std::string& G, double s, double h, double dilation) {
        const GridPtr g = grid_for(domain, h, dilation);
        return field_dict(harmonic_measure(assemble(g, s), parse_shape(G)));
      },
      py::arg("domain"), py::arg("G"), py::arg("s"), py::arg("h"), py::arg("dilation") = 4.0);

  m.def(
      "ball_solution",
      [](double lo, double hi, double x, double s) {
        return ball_solution(indicator_interval(lo, hi), {x, 0.0}, make_kernel_spec({0, 0}, 1.0, s, 1));
      },
      py::arg("lo"), py::arg("hi"), py::arg("x"), py::arg("s"),
      "Poisson-kernel solution on (-1, 1) for data the indicator of [lo, hi].");

  m.def(
      "besov_capacity",
      [](const std::string& K, const std::vector<double>& center, double radius, double h, double s) {
        return besov_capacity(parse_shape(K), Ball{to_point(center), radius}, h, s).value;
      },
      py::arg("K"), py::arg("center"), py::arg("radius"), py::arg("h"), py::arg("s"));

  m.def(
      "weighted_capacity",
      [](const std::string& K, const std::vector<double>& center, double radius, double h, double s) {
        return weighted_capacity(parse_shape(K), Ball{to_point(center), radius}, h, s).value;
      },
      py::arg("K"), py::arg("center"), py::arg("radius"), py::arg("h"), py::arg("s"));

  m.def(
      "fatness_ratio",
      [](const std::vector<double>& anchor, const std::string& E, double r, double h, double s) {
        return fatness_ratio(to_point(anchor), parse_shape(E), r, h, s);
      },
      py::arg("anchor"), py::arg("E"), py::arg("r"), py::arg("h"), py::arg("s"));

  m.def(
      "is_trivial_point",
      [](const std::string& domain, const std::vector<double>& anchor, double r, double s) {
        return trivial_point_test(parse_shape(domain), to_point(anchor), r, s).is_trivial;
      },
      py::arg("domain"), py::arg("anchor"), py::arg("r"), py::arg("s"));

  m.def(
      "run_experiment",
      [](const std::string& config_text, int jobs) {
        const ExperimentConfig c = parse_config(config_text);
        Outcome o;
        {
          py::gil_scoped_release release;
          o = run_experiment(c, {jobs, false});
        }
        return o.report.dump();
      },
      py::arg("config_text"), py::arg("jobs") = 1, "Runs a config and returns report.json as text.");

  m.def(
      "config_hash", [](const std::string& text) { return config_hash(parse_config(text)); }, py::arg("config_text"));

  m.def("domain_catalog", [] {
    py::list out;
    for (const auto& e : domain_catalog()) {
      py::dict d;
      d["name"] = e.name;
      d["expression"] = e.expression;
      d["dim"] = e.dim;
      d["note"] = e.note;
      out.append(d);
    }
    return out;
  });
}

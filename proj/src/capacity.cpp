#include "fracholder/capacity.hpp"

#include <cmath>
#include <map>

#include "fracholder/error.hpp"

namespace fracholder {

namespace {

void check_inside(const Shape& K, const Ball& B) {
  const auto kb = K.bounds();
  if (!kb) throw Error(ErrorCode::GeometryViolation, "condenser set " + K.describe() + " is unbounded");
  Box bb{K.dim(), B.center, B.center};
  for (int d = 0; d < K.dim(); ++d) {
    bb.lo[d] -= B.radius;
    bb.hi[d] += B.radius;
  }
  if (!bb.contains(*kb)) {
    throw Error(ErrorCode::GeometryViolation, "condenser set " + K.describe() + " is not inside the ambient ball");
  }
}

}  // namespace

CapacityResult besov_capacity(const Shape& K, const Ball& B, double h, double s) {
  const int dim = K.dim();
  check_inside(K, B);
  const Shape ball = Shape::ball(B.center, B.radius, dim);
  const GridPtr grid =
      classify(lattice_around(B.center, B.radius, h, dim), Shape::intersect(ball, Shape::complement(K)));
  CapacityResult out;
  out.k_description = K.describe();
  out.ambient = B;
  std::size_t k_nodes = 0;
  for (auto n : grid->exterior()) {
    const Point x = grid->node(n);
    if (!K.contains(x)) continue;
    if (!ball.contains(x)) {
      throw Error(ErrorCode::GeometryViolation, "condenser set " + K.describe() + " leaves the ambient ball");
    }
    ++k_nodes;
  }
  if (k_nodes == 0) {
    out.empty_k = true;
    out.potential = Field{grid, std::vector<double>(grid->size(), 0.0)};
    return out;
  }
  const NonlocalForm form = assemble(grid, s);
  const Field data = exterior_data(grid, [&](const Point& p) { return K.contains(p) ? 1.0 : 0.0; });
  out.potential = solve_dirichlet(form, data, FarField{});
  out.value = energy(form, out.potential, FarField{});
  out.residual = interior_residual(form, out.potential, FarField{});
  return out;
}

CapacityResult weighted_capacity(const Shape& K, const Ball& B, double h, double s,
                                 const WeightedCapacityOptions& options) {
  const int dim = K.dim();
  check_inside(K, B);
  const Shape ball = Shape::ball(B.center, B.radius, dim);
  const GridPtr base = classify(lattice_around(B.center, B.radius, h, dim), ball);
  CapacityResult out;
  out.k_description = K.describe();
  out.ambient = B;
  const double T = B.radius + h;
  const double first = options.first_layer > 0.0 ? options.first_layer : 0.25 * h;
  const int M = layers_for(T, first, options.grading);
  auto eg = std::make_shared<const ExtensionGrid>(build_extension_grid(base, s, T, M, options.grading));
  const WeightedForm form = assemble_weighted(eg);
  std::vector<char> fixed(eg->size(), 0);
  std::vector<double> values(eg->size(), 0.0);
  std::size_t k_nodes = 0;
  const double r2 = B.radius * B.radius;
  for (std::size_t k = 0; k < eg->t.size(); ++k) {
    for (std::size_t j = 0; j < eg->ny(); ++j) {
      for (std::size_t i = 0; i < eg->nx(); ++i) {
        const std::size_t p = eg->flat(i, j, k);
        const Point x{eg->axes[0][i], dim == 2 ? eg->axes[1][j] : 0.0};
        const double dx = x[0] - B.center[0];
        const double dy = dim == 2 ? x[1] - B.center[1] : 0.0;
        const double t = eg->t[k];
        if (dx * dx + dy * dy + t * t >= r2) {
          fixed[p] = 1;
        } else if (k == 0 && K.contains(x)) {
          fixed[p] = 1;
          values[p] = 1.0;
          ++k_nodes;
        }
      }
    }
  }
  if (k_nodes == 0) {
    out.empty_k = true;
    out.potential = Field{base, std::vector<double>(base->size(), 0.0)};
    return out;
  }
  SolveInfo info;
  const ExtensionField v = solve_constrained(form, fixed, std::move(values), &info);
  out.value = weighted_energy(form, v.values);
  out.residual = info.relative_residual;
  out.potential = trace(v);
  return out;
}

double fatness_ratio(const Point& a, const Shape& E, double r, double h, double s) {
  const int dim = E.dim();
  const Ball B{a, 2.0 * r};
  const double num = besov_capacity(Shape::intersect(E, Shape::closed_ball(a, r, dim)), B, h, s).value;
  const double den = besov_capacity(Shape::closed_ball(a, r, dim), B, h, s).value;
  return num / den;
}

FatnessReport fatness_scan(const Shape& E, const std::vector<Point>& anchors, const std::vector<double>& radii,
                           double s, const FatnessOptions& options) {
  const int dim = E.dim();
  const int cells = options.cells > 0 ? options.cells : 8;
  const int ratio = options.ratio > 0 ? options.ratio : (dim == 1 ? 8 : 2);
  const int levels = options.levels > 0 ? options.levels : (dim == 1 ? 3 : 2);
  FatnessReport report;
  report.threshold = options.threshold;
  std::map<std::pair<double, int>, double> denominators;
  report.min_psi = std::numeric_limits<double>::infinity();
  for (const Point& a : anchors) {
    if (!E.contains(a)) throw Error(ErrorCode::GeometryViolation, "fatness anchor must lie in the exterior set");
    for (double r : radii) {
      FatnessEntry entry;
      entry.anchor = a;
      entry.r = r;
      double h = r / cells;
      for (int l = 0; l < levels; ++l, h /= ratio) {
        const Ball B{a, 2.0 * r};
        auto key = std::make_pair(r, l);
        auto it = denominators.find(key);
        if (it == denominators.end()) {
          it = denominators.emplace(key, besov_capacity(Shape::closed_ball(a, r, dim), B, h, s).value).first;
        }
        const double num = besov_capacity(Shape::intersect(E, Shape::closed_ball(a, r, dim)), B, h, s).value;
        entry.h.push_back(h);
        entry.numerator.push_back(num);
        entry.denominator.push_back(it->second);
        entry.psi_levels.push_back(num / it->second);
      }
      bool halving = levels > 1;
      for (int l = 0; l + 1 < levels; ++l) {
        if (!(entry.psi_levels[l + 1] * 2.0 <= entry.psi_levels[l])) halving = false;
      }
      entry.vanishing = halving;
      entry.psi = halving ? 0.0 : entry.psi_levels.back();
      report.min_psi = std::min(report.min_psi, entry.psi);
      report.entries.push_back(std::move(entry));
    }
  }
  if (report.entries.empty()) report.min_psi = 0.0;
  report.fat = !report.entries.empty() && report.min_psi >= options.threshold;
  return report;
}

std::vector<bool> perfectness_check(const Shape& E, const std::vector<Point>& anchors,
                                    const std::vector<double>& radii, double c5, double spacing) {
  if (!(c5 > 0.0 && c5 < 1.0)) throw Error(ErrorCode::InvalidGeometry, "perfectness constant must lie in (0, 1)");
  const int dim = E.dim();
  const double step = spacing / 16.0;
  std::vector<bool> out;
  for (const Point& x : anchors) {
    bool ok = true;
    for (double r : radii) {
      const int m = static_cast<int>(std::ceil(r / step));
      bool hit = false;
      for (int j = dim == 2 ? -m : 0; j <= (dim == 2 ? m : 0) && !hit; ++j) {
        for (int i = -m; i <= m && !hit; ++i) {
          const Point y{x[0] + i * step, x[1] + j * step};
          const double d = distance(x, y);
          if (d >= c5 * r && d <= r && E.contains(y)) hit = true;
        }
      }
      if (!hit) {
        ok = false;
        break;
      }
    }
    out.push_back(ok);
  }
  return out;
}

TrivialPointVerdict trivial_point_test(const Shape& domain, const Point& a, double r, double s,
                                       const TrivialPointOptions& options) {
  const int dim = domain.dim();
  const int cells = options.cells > 0 ? options.cells : (dim == 1 ? 8 : 4);
  const int ratio = options.ratio > 0 ? options.ratio : (dim == 1 ? 8 : 2);
  const Shape K = Shape::intersect(Shape::closed_ball(a, r, dim), Shape::complement(domain));
  TrivialPointVerdict v;
  double h = r / cells;
  for (int l = 0; l < options.levels; ++l, h /= ratio) {
    v.h.push_back(h);
    v.capacity.push_back(besov_capacity(K, Ball{a, 2.0 * r}, h, s).value);
  }
  v.is_trivial = options.levels > 1;
  for (std::size_t l = 0; l + 1 < v.capacity.size(); ++l) {
    if (!(v.capacity[l + 1] * 2.0 <= v.capacity[l])) v.is_trivial = false;
  }
  return v;
}

}  // namespace fracholder

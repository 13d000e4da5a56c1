#include "fracholder/measure.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "fracholder/error.hpp"

namespace fracholder {

FarField far_field_of(const Shape& G, const Box& box) {
  const Point c = box.center();
  const double reach = 1e6 * (1.0 + box.diameter());
  auto side = [&](bool positive) {
    std::vector<double> angles;
    if (box.dim == 1) {
      angles = {positive ? 0.0 : std::numbers::pi};
    } else {
      for (int k = -7; k <= 7; ++k) angles.push_back((positive ? 0.0 : std::numbers::pi) + k * std::numbers::pi / 16);
    }
    int inside = 0;
    for (double phi : angles) {
      const Point y{c[0] + reach * std::cos(phi), box.dim == 2 ? c[1] + reach * std::sin(phi) : 0.0};
      inside += G.contains(y) ? 1 : 0;
    }
    if (inside != 0 && inside != static_cast<int>(angles.size())) {
      throw Error(ErrorCode::UnsupportedFarField,
                  "exterior set " + G.describe() + " is neither eventually in nor out along a half");
    }
    return inside ? 1.0 : 0.0;
  };
  return FarField{side(false), side(true)};
}

Field harmonic_measure(const NonlocalForm& form, const Shape& G, SolveInfo* info) {
  const GridPtr& grid = form.grid();
  for (auto n : grid->interior()) {
    if (G.contains(grid->node(n))) {
      throw Error(ErrorCode::GNotInComplement, "exterior set " + G.describe() + " meets the domain");
    }
  }
  const FarField far = far_field_of(G, grid->lattice().box());
  const Field data = exterior_data(grid, [&](const Point& p) { return G.contains(p) ? 1.0 : 0.0; });
  return solve_dirichlet(form, data, far, info);
}

double complementation_residual(const NonlocalForm& form, const Shape& G) {
  const Shape rest = Shape::intersect(Shape::complement(form.grid()->region()), Shape::complement(G));
  const Field a = harmonic_measure(form, G);
  const Field b = harmonic_measure(form, rest);
  double worst = 0.0;
  for (auto n : form.grid()->interior()) worst = std::max(worst, std::abs(a[n] + b[n] - 1.0));
  return worst;
}

std::string to_string(DecayKind kind) { return kind == DecayKind::Global ? "GHMD" : "LHMD"; }

std::vector<double> dyadic_radii(double diameter, int levels) {
  std::vector<double> radii;
  for (int k = 0; k < levels; ++k) radii.push_back(0.25 * diameter * std::ldexp(1.0, -k));
  return radii;
}

DecaySample probe_ring(const Field& field, const Point& a, double target) {
  const Grid& grid = *field.grid;
  const double tol = 0.5 * grid.h();
  DecaySample best{0.0, 0.0, -1.0};
  double nearest_gap = std::numeric_limits<double>::infinity();
  DecaySample nearest{};
  for (auto n : grid.interior()) {
    const double d = distance(grid.node(n), a);
    const double gap = std::abs(d - target);
    if (gap <= tol && field[n] > best.value) best = {0.0, d, field[n]};
    if (gap < nearest_gap) {
      nearest_gap = gap;
      nearest = {0.0, d, field[n]};
    }
  }
  return best.value >= 0.0 ? best : nearest;
}

DecaySamples ghmd_samples(const NonlocalForm& form, const Point& a, std::vector<double> radii,
                          const std::vector<double>& probes) {
  const GridPtr& grid = form.grid();
  const Point anchor = grid->node(grid->snap_anchor(a));
  const double diam = grid->diameter();
  if (radii.empty()) radii = dyadic_radii(diam);
  DecaySamples out{DecayKind::Global, anchor, radii, {}};
  const Shape outside = Shape::complement(grid->region());
  for (double r : radii) {
    if (!(r > 0.0) || r >= 0.5 * diam) {
      throw Error(ErrorCode::RadiusTooLarge, "decay radius must lie in (0, diam / 2)");
    }
    const Shape G = Shape::intersect(outside, Shape::complement(Shape::ball(anchor, r, grid->dim())));
    const Field omega = harmonic_measure(form, G);
    for (double q : probes) {
      DecaySample smp = probe_ring(omega, anchor, q * r);
      smp.r = r;
      out.samples.push_back(smp);
    }
  }
  return out;
}

DecaySamples lhmd_samples(const GridPtr& grid, double s, const Point& a, std::vector<double> radii,
                          const std::vector<double>& probes, LocalOptions options) {
  const Point anchor = grid->node(grid->snap_anchor(a));
  const double diam = grid->diameter();
  if (radii.empty()) radii = dyadic_radii(diam);
  const int dim = grid->dim();
  const int cells = options.cells_per_radius > 0 ? options.cells_per_radius : (dim == 1 ? 128 : 20);
  DecaySamples out{DecayKind::Local, anchor, radii, {}};
  for (double r : radii) {
    if (!(r > 0.0) || r >= 0.5 * diam) {
      throw Error(ErrorCode::RadiusTooLarge, "decay radius must lie in (0, diam / 2)");
    }
    const double h = r / cells;
    const Shape ball = Shape::ball(anchor, r, dim);
    const GridPtr local = classify(lattice_around(anchor, r + h, h, dim), Shape::intersect(grid->region(), ball));
    if (local->interior().empty()) {
      throw Error(ErrorCode::LocalDomainEmpty, "domain has no nodes inside the anchor ball");
    }
    const NonlocalForm form = assemble(local, s);
    const Field data = exterior_data(local, [&](const Point& p) { return ball.contains(p) ? 0.0 : 1.0; });
    const Field omega = solve_dirichlet(form, data, FarField::uniform(1.0));
    for (double q : probes) {
      DecaySample smp = probe_ring(omega, anchor, q * r);
      smp.r = r;
      out.samples.push_back(smp);
    }
  }
  return out;
}

DecayFit fit_decay(const DecaySamples& samples, double floor) {
  std::vector<double> xs, ys;
  for (const auto& smp : samples.samples) {
    if (!(smp.value >= floor) || !(smp.d > 0.0) || !(smp.r > 0.0)) continue;
    xs.push_back(std::log(smp.d / smp.r));
    ys.push_back(std::log(smp.value));
  }
  const std::size_t n = xs.size();
  if (n < 6) throw Error(ErrorCode::InsufficientSamples, "decay fit needs at least 6 usable samples");
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    mx += xs[k];
    my += ys[k];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    sxx += (xs[k] - mx) * (xs[k] - mx);
    sxy += (xs[k] - mx) * (ys[k] - my);
    syy += (ys[k] - my) * (ys[k] - my);
  }
  if (syy <= 1e-24 * n || sxx <= 1e-24 * n) {
    throw Error(ErrorCode::DegenerateSamples, "decay samples carry no spread");
  }
  DecayFit fit;
  fit.exponent = sxy / sxx;
  const double intercept = my - fit.exponent * mx;
  fit.constant = std::exp(intercept);
  double rss = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double e = ys[k] - intercept - fit.exponent * xs[k];
    rss += e * e;
  }
  fit.residual = std::sqrt(rss / n);
  fit.count = n;
  return fit;
}

}  // namespace fracholder

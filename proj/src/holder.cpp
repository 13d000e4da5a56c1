#include "fracholder/holder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fracholder/error.hpp"

namespace fracholder {

double phi(const Point& a, double sigma, const Point& x) { return std::min(std::pow(distance(x, a), sigma), 1.0); }

ConditionResult condition_ii_constant(const NonlocalForm& form, const Point& a, double sigma) {
  const GridPtr& grid = form.grid();
  ConditionResult out;
  out.anchor = grid->node(grid->snap_anchor(a));
  const Field data = exterior_data(grid, [&](const Point& x) { return phi(out.anchor, sigma, x); });
  out.solution = solve_dirichlet(form, data, FarField::uniform(1.0));
  const double cutoff = 2.0 * grid->h() * (1.0 - 1e-9);
  for (auto n : grid->interior()) {
    const double d = distance(grid->node(n), out.anchor);
    if (d < cutoff) continue;
    out.constant = std::max(out.constant, out.solution[n] / std::pow(d, sigma));
  }
  return out;
}

double holder_seminorm(const Field& u, double sigma) {
  const Grid& grid = *u.grid;
  const auto& nodes = grid.interior();
  std::vector<Point> x(nodes.size());
  std::vector<double> v(nodes.size());
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    x[k] = grid.node(nodes[k]);
    v[k] = u[nodes[k]];
  }
  const double half = 0.5 * sigma;
  double best = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      const double diff = std::abs(v[i] - v[j]);
      if (diff == 0.0) continue;
      const double dx = x[i][0] - x[j][0];
      const double dy = x[i][1] - x[j][1];
      best = std::max(best, diff / std::pow(dx * dx + dy * dy, half));
    }
  }
  return best;
}

double operator_norm_lower_bound(const NonlocalForm& form, double sigma, const std::vector<Point>& anchors) {
  double best = 0.0;
  for (const Point& a : anchors) {
    const ConditionResult c = condition_ii_constant(form, a, sigma);
    double sup = 0.0;
    for (auto n : form.grid()->interior()) sup = std::max(sup, std::abs(c.solution[n]));
    best = std::max(best, 0.5 * (sup + holder_seminorm(c.solution, sigma)));
  }
  return best;
}

OscillationFit alpha0_estimate(const Field& u, const Point& x, double rho, int levels) {
  const Grid& grid = *u.grid;
  const double h = grid.h();
  if (levels < 2 || rho * std::ldexp(1.0, -(levels - 1)) < h * (1.0 - 1e-9)) {
    throw Error(ErrorCode::InsufficientInteriorRoom, "smallest oscillation ball is below the grid spacing");
  }
  OscillationFit fit;
  for (int k = 0; k < levels; ++k) {
    const double r = rho * std::ldexp(1.0, -k);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t n = 0; n < grid.size(); ++n) {
      if (distance(grid.node(n), x) > r * (1.0 + 1e-12)) continue;
      if (!grid.is_interior(n)) {
        throw Error(ErrorCode::InsufficientInteriorRoom, "oscillation ball is not compactly inside the domain");
      }
      lo = std::min(lo, u[n]);
      hi = std::max(hi, u[n]);
    }
    fit.radii.push_back(r);
    fit.oscillation.push_back(hi - lo);
  }
  std::vector<double> lx, ly;
  for (std::size_t k = 0; k < fit.radii.size(); ++k) {
    if (fit.oscillation[k] > 0.0) {
      lx.push_back(std::log(fit.radii[k]));
      ly.push_back(std::log(fit.oscillation[k]));
    }
  }
  if (lx.size() < 2) return fit;
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < lx.size(); ++k) {
    mx += lx[k];
    my += ly[k];
  }
  mx /= lx.size();
  my /= lx.size();
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < lx.size(); ++k) {
    sxx += (lx[k] - mx) * (lx[k] - mx);
    sxy += (lx[k] - mx) * (ly[k] - my);
  }
  fit.exponent = sxy / sxx;
  return fit;
}

std::vector<double> sigma_grid(double s, double sigma0, double margin) {
  std::vector<double> out;
  for (double sigma : {0.1, 0.25, 0.5 * s, 0.9 * sigma0}) {
    if (sigma > 0.0 && sigma <= sigma0 - margin + 1e-12 &&
        std::none_of(out.begin(), out.end(), [&](double v) { return std::abs(v - sigma) < 1e-12; })) {
      out.push_back(sigma);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace fracholder

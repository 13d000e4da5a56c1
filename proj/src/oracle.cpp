#include "fracholder/oracle.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "fracholder/error.hpp"

namespace fracholder {

namespace {

constexpr double kAbsTol = 1e-6;

using boost::math::quadrature::tanh_sinh;

// Integrate f(u, 1 - u) over [a, b] within (0, 1], keeping 1 - u accurate near u = 1.
template <class F>
double integrate_unit(F&& f, double a, double b, double* error) {
  thread_local tanh_sinh<double> ts(15);
  const double mid = 0.5 * (a + b);
  double err = 0.0;
  double l1 = 0.0;
  const double v = ts.integrate(
      [&](double u, double uc) -> double {
        const double one_minus = (b == 1.0 && u > mid) ? uc : 1.0 - u;
        return f(u, one_minus);
      },
      a, b, 1e-12, &err, &l1);
  if (error) *error += err;
  return v;
}

std::vector<double> unit_pieces(const std::vector<double>& dist_breaks, double r) {
  // Breaks given as distances beyond the centre; u = r / dist.
  std::vector<double> cuts{0.0, 1.0};
  for (double d : dist_breaks) {
    if (d > r && std::isfinite(d)) cuts.push_back(r / d);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  return cuts;
}

void check_position(const Point& x, const KernelSpec& spec) {
  if (!(distance(x, spec.center) < spec.radius)) {
    throw Error(ErrorCode::PointsOutOfPosition, "evaluation point must lie inside the ball");
  }
}

std::string fmt(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

double kernel_mass(double s, int dim) {
  double err = 0.0;
  // With v = u^2 the radial integral is (1/2) int_0^1 v^{s-1} (1-v)^{-s} dv.
  const double radial = 0.5 * integrate_unit(
                                  [s](double v, double one_minus) {
                                    return std::pow(v, s - 1.0) * std::pow(one_minus, -s);
                                  },
                                  0.0, 1.0, &err);
  return (dim == 1 ? 2.0 : 2.0 * std::numbers::pi) * radial;
}

KernelSpec make_kernel_spec(Point center, double radius, double s, int dim) {
  if (!(s > 0.0 && s < 1.0)) throw Error(ErrorCode::SOutOfRange, "order s must lie in (0, 1)");
  if (!(radius > 0.0)) throw Error(ErrorCode::InvalidGeometry, "kernel ball radius must be > 0");
  if (dim == 1) center[1] = 0.0;
  return KernelSpec{center, radius, s, dim, 1.0 / kernel_mass(s, dim)};
}

double ball_kernel(const Point& x, const Point& y, const KernelSpec& spec) {
  const double rx = distance(x, spec.center);
  const double ry = distance(y, spec.center);
  if (!(rx < spec.radius && ry > spec.radius)) {
    throw Error(ErrorCode::PointsOutOfPosition, "kernel needs |x - c| < r < |y - c|");
  }
  const double r2 = spec.radius * spec.radius;
  return spec.normalization * std::pow((r2 - rx * rx) / (ry * ry - r2), spec.s) *
         std::pow(distance(x, y), -static_cast<double>(spec.dim));
}

ExteriorFunction indicator_interval(double lo, double hi) {
  ExteriorFunction g;
  g.value = [lo, hi](const Point& y) { return (y[0] >= lo && y[0] <= hi) ? 1.0 : 0.0; };
  g.breaks = {lo, hi};
  return g;
}

ExteriorFunction constant_function(double v) {
  ExteriorFunction g;
  g.value = [v](const Point&) { return v; };
  return g;
}

double ball_solution(const ExteriorFunction& g, const Point& x0, const KernelSpec& spec) {
  Point x = x0;
  if (spec.dim == 1) x[1] = 0.0;
  check_position(x, spec);
  const double r = spec.radius;
  const double r2 = r * r;
  const double s = spec.s;
  const Point c = spec.center;
  const double depth = r2 - std::pow(distance(x, c), 2);
  double err = 0.0;
  double total = 0.0;

  if (spec.dim == 1) {
    for (int side : {1, -1}) {
      std::vector<double> dist;
      for (double b : g.breaks) dist.push_back(side * (b - c[0]));
      const auto cuts = unit_pieces(dist, r);
      auto f = [&](double u, double one_minus) {
        if (u <= 0.0) return 0.0;
        const double y = c[0] + side * r / u;
        const double val = g.value({y, 0.0});
        if (val == 0.0) return 0.0;
        // (depth / (y^2 - r^2))^s r / (u^2 |x - y|) with the powers of u cancelled.
        const double ratio = depth * u * u / (r2 * one_minus * (1.0 + u));
        return val * std::pow(ratio, s) * r / (u * std::abs(r - side * u * (x[0] - c[0])));
      };
      for (std::size_t k = 0; k + 1 < cuts.size(); ++k) total += integrate_unit(f, cuts[k], cuts[k + 1], &err);
    }
  } else {
    std::vector<double> angles{0.0, 2.0 * std::numbers::pi};
    for (double a : g.angle_breaks) {
      double t = std::fmod(a, 2.0 * std::numbers::pi);
      if (t < 0) t += 2.0 * std::numbers::pi;
      angles.push_back(t);
    }
    std::sort(angles.begin(), angles.end());
    angles.erase(std::unique(angles.begin(), angles.end()), angles.end());
    const auto cuts = unit_pieces(g.breaks, r);
    auto radial = [&](double phi) {
      const Point e{std::cos(phi), std::sin(phi)};
      auto f = [&](double u, double one_minus) {
        if (u <= 0.0) return 0.0;
        const double rho = r / u;
        const Point y{c[0] + rho * e[0], c[1] + rho * e[1]};
        const double val = g.value(y);
        if (val == 0.0) return 0.0;
        const double ratio = depth * u * u / (r2 * one_minus * (1.0 + u));
        const double qx = e[0] - u * (x[0] - c[0]) / r;
        const double qy = e[1] - u * (x[1] - c[1]) / r;
        return val * std::pow(ratio, s) / (u * (qx * qx + qy * qy));
      };
      double acc = 0.0;
      for (std::size_t k = 0; k + 1 < cuts.size(); ++k) acc += integrate_unit(f, cuts[k], cuts[k + 1], nullptr);
      return acc;
    };
    for (std::size_t k = 0; k + 1 < angles.size(); ++k) {
      double e = 0.0;
      total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(radial, angles[k], angles[k + 1], 8,
                                                                             1e-10, &e);
      err += e;
    }
  }
  const double value = spec.normalization * total;
  if (!std::isfinite(value) || spec.normalization * err > kAbsTol) {
    throw Error(ErrorCode::QuadratureFailure, "oracle quadrature did not reach 1e-6");
  }
  return value;
}

double halfspace_profile(double d, double s) { return d > 0.0 ? std::pow(d, s) : 0.0; }

std::vector<GoldenRow> golden_rows() {
  std::vector<GoldenRow> rows;
  for (double s : {0.25, 0.5, 0.75}) {
    const KernelSpec spec = make_kernel_spec({0.0, 0.0}, 1.0, s, 1);
    const auto band = indicator_interval(1.0, 2.0);
    const auto half = indicator_interval(1.0, std::numeric_limits<double>::infinity());
    for (double x : {-0.75, -0.5, 0.0, 0.5, 0.75}) {
      rows.push_back({"band_1_2", 1, s, x, ball_solution(band, {x, 0.0}, spec)});
      rows.push_back({"right_halfline", 1, s, x, ball_solution(half, {x, 0.0}, spec)});
    }
  }
  return rows;
}

std::string golden_csv(const std::vector<GoldenRow>& rows) {
  std::ostringstream out;
  out << "# version 1\nlabel,dim,s,x,value\n";
  for (const auto& r : rows) {
    out << r.label << ',' << r.dim << ',' << fmt(r.s) << ',' << fmt(r.x) << ',' << fmt(r.value) << '\n';
  }
  return out.str();
}

std::vector<GoldenRow> parse_golden_csv(const std::string& text) {
  std::vector<GoldenRow> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("label,", 0) == 0) continue;
    std::istringstream fields(line);
    GoldenRow row;
    std::string cell;
    std::getline(fields, row.label, ',');
    std::getline(fields, cell, ',');
    row.dim = std::stoi(cell);
    std::getline(fields, cell, ',');
    row.s = std::stod(cell);
    std::getline(fields, cell, ',');
    row.x = std::stod(cell);
    std::getline(fields, cell, ',');
    row.value = std::stod(cell);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace fracholder

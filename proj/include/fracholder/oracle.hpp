#pragma once

#include <functional>
#include <string>
#include <vector>

#include "fracholder/geometry.hpp"

namespace fracholder {

/// Poisson kernel of the ball B_r(c) for (-Delta)^s, self-normalized.
struct KernelSpec {
  Point center{};
  double radius = 1.0;
  double s = 0.5;
  int dim = 1;
  double normalization = 1.0;
};

KernelSpec make_kernel_spec(Point center, double radius, double s, int dim);

/// Kernel integral over |y - c| > r at x = c before normalization.
double kernel_mass(double s, int dim);

double ball_kernel(const Point& x, const Point& y, const KernelSpec& spec);

/// Exterior datum with its jump locations, so quadrature can split there.
struct ExteriorFunction {
  std::function<double(const Point&)> value;
  /// 1D: coordinates of jumps. 2D: distances from the ball centre.
  std::vector<double> breaks;
  /// 2D only: polar angles (about the centre) of jumps.
  std::vector<double> angle_breaks;
};

ExteriorFunction indicator_interval(double lo, double hi);  // closed [lo, hi], hi may be +-inf
ExteriorFunction constant_function(double v);

/// Integral of g(y) K(x, y) over the exterior of the ball, to absolute 1e-6.
double ball_solution(const ExteriorFunction& g, const Point& x, const KernelSpec& spec);

/// Flat-boundary barrier profile d^s.
double halfspace_profile(double d, double s);

struct GoldenRow {
  std::string label;
  int dim = 1;
  double s = 0.5;
  double x = 0.0;
  double value = 0.0;
};

/// Reference values of the interval oracle emitted to the versioned CSV.
std::vector<GoldenRow> golden_rows();
std::string golden_csv(const std::vector<GoldenRow>& rows);
std::vector<GoldenRow> parse_golden_csv(const std::string& text);

}  // namespace fracholder

#pragma once

#include <optional>
#include <vector>

#include "fracholder/nonlocal.hpp"

namespace fracholder {

/// min{d(x, a)^sigma, 1}.
double phi(const Point& a, double sigma, const Point& x);

struct ConditionResult {
  double constant = 0.0;  // C1
  Point anchor{};
  Field solution;
};

/// sup over interior nodes with d(x, a) >= 2h of (P phi_{a,sigma})(x) / d(x, a)^sigma.
ConditionResult condition_ii_constant(const NonlocalForm& form, const Point& a, double sigma);

/// max over interior pairs of |u_i - u_j| / |x_i - x_j|^sigma.
double holder_seminorm(const Field& u, double sigma);

/// max over anchors of (sup |P phi| + [P phi]_sigma) / 2.
double operator_norm_lower_bound(const NonlocalForm& form, double sigma, const std::vector<Point>& anchors);

struct OscillationFit {
  std::vector<double> radii;
  std::vector<double> oscillation;
  std::optional<double> exponent;  // nullopt when the field is constant
};

/// Oscillation of u over B_rho 2^{-k}(x), k = 0..levels-1, and the fitted decay exponent.
OscillationFit alpha0_estimate(const Field& u, const Point& x, double rho, int levels = 4);

/// Exponents {0.1, 0.25, s/2, 0.9 sigma0} that respect sigma <= sigma0 - margin.
std::vector<double> sigma_grid(double s, double sigma0, double margin = 0.1);

}  // namespace fracholder

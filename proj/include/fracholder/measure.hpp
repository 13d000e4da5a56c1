#pragma once

#include <string>
#include <vector>

#include "fracholder/nonlocal.hpp"

namespace fracholder {

/// Value of chi_G beyond the box, probed far along each half; throws
/// UnsupportedFarField when a half is not uniformly in or out of G.
FarField far_field_of(const Shape& G, const Box& box);

/// omega(G, Omega; s): the Dirichlet solution with data chi_G.
Field harmonic_measure(const NonlocalForm& form, const Shape& G, SolveInfo* info = nullptr);

/// sup over interior nodes of |omega(G) + omega(Omega^c \ G) - 1|.
double complementation_residual(const NonlocalForm& form, const Shape& G);

enum class DecayKind { Global, Local };
std::string to_string(DecayKind kind);

struct DecaySample {
  double r = 0.0;
  double d = 0.0;
  double value = 0.0;
};

struct DecaySamples {
  DecayKind kind = DecayKind::Global;
  Point anchor{};
  std::vector<double> radii;
  std::vector<DecaySample> samples;
};

struct DecayFit {
  double exponent = 0.0;
  double constant = 0.0;
  double residual = 0.0;
  std::size_t count = 0;
};

/// r_k = (diam / 4) 2^{-k}, k = 0..levels-1.
std::vector<double> dyadic_radii(double diameter, int levels = 6);

inline const std::vector<double> kProbeFractions{0.5, 0.25, 0.125};

/// Sample omega(Omega^c \ B_r(a)) near the snapped anchor for each radius.
DecaySamples ghmd_samples(const NonlocalForm& form, const Point& a, std::vector<double> radii = {},
                          const std::vector<double>& probes = kProbeFractions);

struct LocalOptions {
  int cells_per_radius = 0;  // 0 picks 128 in 1D and 20 in 2D
};

/// Sample omega((B_r(a))^c, Omega cap B_r(a)) on a fresh grid per radius.
DecaySamples lhmd_samples(const GridPtr& grid, double s, const Point& a, std::vector<double> radii = {},
                          const std::vector<double>& probes = kProbeFractions, LocalOptions options = {});

/// Least squares of log(value) against log(d / r); values below `floor` are dropped.
DecayFit fit_decay(const DecaySamples& samples, double floor = 10.0 * kSolverTolerance);

/// Largest value among nodes of `field` whose distance to `a` is within h/2 of
/// `target`, or the node nearest that distance when the ring is empty.
DecaySample probe_ring(const Field& field, const Point& a, double target);

}  // namespace fracholder

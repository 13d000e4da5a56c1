#pragma once

#include <string>
#include <vector>

#include "fracholder/extension.hpp"
#include "fracholder/nonlocal.hpp"

namespace fracholder {

struct Ball {
  Point center{};
  double radius = 1.0;
};

struct CapacityResult {
  double value = 0.0;
  Field potential;
  double residual = 0.0;
  bool empty_k = false;
  std::string k_description;
  Ball ambient;
};

/// Condenser capacity of compact K in the open ball B for the unnormalized
/// Gagliardo energy, on a lattice of spacing h centred at B's centre.
CapacityResult besov_capacity(const Shape& K, const Ball& B, double h, double s);

struct WeightedCapacityOptions {
  double grading = 1.15;
  double first_layer = 0.0;  // 0 selects h / 4
};

/// Capacity of K x {0} in the (N+1)-ball B for the energy 2 int |grad v|^2 |t|^theta.
CapacityResult weighted_capacity(const Shape& K, const Ball& B, double h, double s,
                                 const WeightedCapacityOptions& options = {});

/// psi(a, E, r) = Cap(E cap closed B_r(a), B_2r(a)) / Cap(closed B_r(a), B_2r(a)).
double fatness_ratio(const Point& a, const Shape& E, double r, double h, double s);

struct FatnessOptions {
  int cells = 0;       // cells per radius on the coarsest level; 0 picks 8
  int ratio = 0;       // refinement ratio; 0 picks 8 in 1D and 2 in 2D
  int levels = 0;      // 0 picks 3 in 1D and 2 in 2D
  double threshold = 0.05;
};

struct FatnessEntry {
  Point anchor{};
  double r = 0.0;
  std::vector<double> h;
  std::vector<double> numerator;
  std::vector<double> denominator;
  std::vector<double> psi_levels;
  double psi = 0.0;       // limit estimate
  bool vanishing = false;  // halved at every refinement
};

struct FatnessReport {
  std::vector<FatnessEntry> entries;
  double min_psi = 0.0;
  double threshold = 0.05;
  bool fat = false;
};

FatnessReport fatness_scan(const Shape& E, const std::vector<Point>& anchors, const std::vector<double>& radii,
                           double s, const FatnessOptions& options = {});

/// For each anchor: every annulus A(x, C5 r, r) over `radii` meets E, sampled at spacing / 16.
std::vector<bool> perfectness_check(const Shape& E, const std::vector<Point>& anchors,
                                    const std::vector<double>& radii, double c5, double spacing);

struct TrivialPointVerdict {
  bool is_trivial = false;
  std::vector<double> h;
  std::vector<double> capacity;
};

struct TrivialPointOptions {
  int levels = 3;
  int cells = 0;  // cells per radius on the coarsest level; 0 picks 8 in 1D and 4 in 2D
  int ratio = 0;  // 0 picks 8 in 1D and 2 in 2D
};

/// Capacity of closed B_r(a) \ Omega in B_2r(a) under refinement; trivial when every
/// refinement at least halves it.
TrivialPointVerdict trivial_point_test(const Shape& domain, const Point& a, double r, double s,
                                       const TrivialPointOptions& options = {});

}  // namespace fracholder

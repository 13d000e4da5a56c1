#pragma once

#include <Eigen/SparseCore>
#include <memory>
#include <vector>

#include "fracholder/geometry.hpp"
#include "fracholder/nonlocal.hpp"

namespace fracholder {

using ExtensionGridPtr = std::shared_ptr<const ExtensionGrid>;

/// Finite-volume stiffness of div(|t|^theta grad) on t >= 0, doubled for the
/// reflected half. Lateral links carry the dual-cell integral of t^theta; normal
/// links the harmonic mean 1 / int t^{-theta} over the layer.
struct WeightedForm {
  ExtensionGridPtr grid;
  Eigen::SparseMatrix<double> stiffness;
};

WeightedForm assemble_weighted(ExtensionGridPtr grid);
WeightedForm assemble_weighted(const ExtensionGrid& grid);

struct ExtensionField {
  ExtensionGridPtr grid;
  std::vector<double> values;
};

/// Solves with `fixed` nodes held at `values`; the rest is the energy minimizer.
ExtensionField solve_constrained(const WeightedForm& form, const std::vector<char>& fixed,
                                 std::vector<double> values, SolveInfo* info = nullptr);

/// Exterior data on the trace plane plus far-field walls.
ExtensionField solve_extension(const WeightedForm& form, const Field& g, FarField far, SolveInfo* info = nullptr);

Field trace(const ExtensionField& u);

double weighted_energy(const WeightedForm& form, const std::vector<double>& v);

struct ExtensionParams {
  double height_factor = 8.0;  // T = factor * diam
  double grading = 1.15;
  double first_layer = 0.0;    // 0 selects h
  bool pad = true;             // lateral padding out to T
};

ExtensionGrid make_extension_grid(GridPtr base, double s, const ExtensionParams& params = {});

struct CsReport {
  double sup_error = 0.0;
  double l2_error = 0.0;
  double h = 0.0;
  double height = 0.0;
  int layers = 0;
  double grading = 1.0;
  std::size_t unknowns = 0;
};

CsReport cs_consistency(GridPtr grid, double s, const Field& g, FarField far, const ExtensionParams& params = {});

}  // namespace fracholder

#pragma once

#include <Eigen/Core>
#include <functional>
#include <vector>

#include "fracholder/geometry.hpp"
#include "fracholder/solver.hpp"

namespace fracholder {

/// Limits of the exterior data beyond the stored box, on the two sides of the
/// box centre along the first axis.
struct FarField {
  double negative = 0.0;
  double positive = 0.0;
  static FarField uniform(double v) { return {v, v}; }
  bool operator==(const FarField&) const = default;
};

/// Node-indexed values on a grid.
struct Field {
  GridPtr grid;
  std::vector<double> values;

  double operator[](std::size_t n) const { return values[n]; }
  double& operator[](std::size_t n) { return values[n]; }
  std::size_t size() const noexcept { return values.size(); }
};

Field make_field(GridPtr grid, const std::function<double(const Point&)>& f);
/// Field equal to f on exterior nodes and 0 on interior nodes.
Field exterior_data(GridPtr grid, const std::function<double(const Point&)>& f);

/// Discrete Gagliardo form
///   E(u) = sum_{i<j} w_ij (u_i - u_j)^2 + sum_i d_i^- (u_i - g^-)^2 + d_i^+ (u_i - g^+)^2.
/// Weights are node-to-cell collocations of |x - y|^{-N-2s} over the part of
/// each node cell lying in the node's own class.
class NonlocalForm {
 public:
  NonlocalForm(GridPtr grid, double s);

  const GridPtr& grid() const noexcept { return grid_; }
  double s() const noexcept { return s_; }

  /// w_ij for any two distinct stored nodes.
  double weight(std::size_t i, std::size_t j) const;
  /// Tail coupling of node n to the far field on one side.
  double tail(std::size_t n, bool positive) const;

  /// Weights among interior nodes, indexed by interior slot; zero diagonal.
  const Eigen::MatrixXd& interior_weights() const noexcept { return w_interior_; }
  /// Diagonal of the reduced system: all weights and tails touching the node.
  const Eigen::VectorXd& degree() const noexcept { return degree_; }

  /// Unclipped weight between cells offset by (di, dj) lattice steps.
  double translation_weight(int di, int dj) const;

 private:
  double row_weight(std::size_t slot, std::size_t j) const;

  GridPtr grid_;
  double s_;
  int table_stride_ = 0;
  std::vector<double> table_;
  std::vector<long> cut_slot_;
  std::vector<Eigen::VectorXd> cut_columns_;
  Eigen::MatrixXd w_interior_;
  Eigen::VectorXd degree_;
  Eigen::VectorXd tail_neg_, tail_pos_;
};

NonlocalForm assemble(GridPtr grid, double s);

double energy(const NonlocalForm& form, const Field& u, FarField far = {});

/// Minimizer of the form among fields equal to g on exterior nodes and
/// tending to `far` beyond the box.
Field solve_dirichlet(const NonlocalForm& form, const Field& g, FarField far, SolveInfo* info = nullptr);

/// Residual of the discrete equation at interior nodes, scaled by the degree.
double interior_residual(const NonlocalForm& form, const Field& u, FarField far);

namespace kernel {
/// Integral of |x - y|^{-1-2s} over y in [a, b], with x outside (a, b).
double interval_integral(double x, double a, double b, double s);
/// Integral of |y|^{-2-2s} over the square with lower corner lo and side len, not containing 0.
double square_integral(const Point& lo, double len, double s, int depth);
/// Coefficient on each axial neighbour that restores the self-cell integral.
double self_cell_correction(double h, double s, int dim);
/// Integral of |x - y|^{-N-2s} over y outside `box` restricted to one side.
double box_tail(const Point& x, const Box& box, double s, bool positive);
}  // namespace kernel

}  // namespace fracholder

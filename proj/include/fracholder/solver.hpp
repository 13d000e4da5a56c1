#pragma once

#include <Eigen/Core>
#include <Eigen/IterativeLinearSolvers>
#include <cmath>
#include <string>

#include "fracholder/error.hpp"

namespace fracholder {

struct SolveInfo {
  int iterations = 0;
  double relative_residual = 0.0;
};

inline constexpr double kSolverTolerance = 1e-10;

inline int iteration_cap(Eigen::Index unknowns) {
  return static_cast<int>(std::ceil(50.0 * std::sqrt(static_cast<double>(std::max<Eigen::Index>(unknowns, 1)))));
}

/// Jacobi-preconditioned conjugate gradients on an SPD matrix, dense or sparse.
/// Throws SolverDiverged when the tolerance is not reached within the cap.
template <class Matrix>
Eigen::VectorXd solve_spd(const Matrix& A, const Eigen::VectorXd& b, SolveInfo* info = nullptr) {
  if (info) *info = {};
  if (b.size() == 0 || b.norm() == 0.0) return Eigen::VectorXd::Zero(b.size());
  Eigen::ConjugateGradient<Matrix, Eigen::Lower | Eigen::Upper> cg;
  cg.setTolerance(kSolverTolerance);
  cg.setMaxIterations(iteration_cap(b.size()));
  cg.compute(A);
  Eigen::VectorXd x = cg.solve(b);
  if (cg.info() != Eigen::Success) {
    throw Error(ErrorCode::SolverDiverged, "conjugate gradients stalled at relative residual " +
                                               std::to_string(cg.error()) + " after " +
                                               std::to_string(cg.iterations()) + " iterations");
  }
  if (info) {
    info->iterations = static_cast<int>(cg.iterations());
    info->relative_residual = cg.error();
  }
  return x;
}

}  // namespace fracholder

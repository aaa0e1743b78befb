#ifndef OSWR_LINEAR_SOLVER_HPP_
#define OSWR_LINEAR_SOLVER_HPP_

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <memory>

namespace oswr {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Sparse LU factorization of a square system. solve() checks the relative
/// residual and applies one step of iterative refinement; a residual above
/// 1e-12 after refinement raises SolverError.
class LinearSolver {
 public:
  explicit LinearSolver(const SparseMatrix &a);
  ~LinearSolver();
  LinearSolver(LinearSolver &&) noexcept;
  LinearSolver &operator=(LinearSolver &&) noexcept;

  Eigen::VectorXd solve(const Eigen::VectorXd &rhs) const;
  Eigen::Index size() const;

  static constexpr double kTolerance = 1e-12;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

Eigen::VectorXd linear_solve(const SparseMatrix &a, const Eigen::VectorXd &rhs);

}  // namespace oswr

#endif  // OSWR_LINEAR_SOLVER_HPP_

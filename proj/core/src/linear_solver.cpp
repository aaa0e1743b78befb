#include "oswr/linear_solver.hpp"

#include <Eigen/SparseLU>
#include <cmath>

#include "oswr/error.hpp"

namespace oswr {

struct LinearSolver::Impl {
  SparseMatrix a;
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
};

LinearSolver::LinearSolver(const SparseMatrix &a) : impl_(std::make_unique<Impl>()) {
  if (a.rows() != a.cols()) throw SolverError("linear system is not square", NAN);
  impl_->a = a;
  impl_->a.makeCompressed();
  impl_->lu.analyzePattern(impl_->a);
  impl_->lu.factorize(impl_->a);
  if (impl_->lu.info() != Eigen::Success) {
    throw SolverError("sparse LU factorization failed: " + impl_->lu.lastErrorMessage(), NAN);
  }
}

LinearSolver::~LinearSolver() = default;
LinearSolver::LinearSolver(LinearSolver &&) noexcept = default;
LinearSolver &LinearSolver::operator=(LinearSolver &&) noexcept = default;

Eigen::Index LinearSolver::size() const { return impl_->a.rows(); }

Eigen::VectorXd LinearSolver::solve(const Eigen::VectorXd &rhs) const {
  const double bnorm = rhs.norm();
  if (bnorm == 0.0) return Eigen::VectorXd::Zero(rhs.size());
  Eigen::VectorXd x = impl_->lu.solve(rhs);
  Eigen::VectorXd r = rhs - impl_->a * x;
  double rel = r.norm() / bnorm;
  if (rel > 1e-14 && std::isfinite(rel)) {
    x += impl_->lu.solve(r);
    r = rhs - impl_->a * x;
    rel = r.norm() / bnorm;
  }
  if (!(rel <= kTolerance)) {
    throw SolverError("linear solve did not reach the residual tolerance", rel);
  }
  return x;
}

Eigen::VectorXd linear_solve(const SparseMatrix &a, const Eigen::VectorXd &rhs) {
  return LinearSolver(a).solve(rhs);
}

}  // namespace oswr

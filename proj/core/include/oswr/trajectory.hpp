#ifndef OSWR_TRAJECTORY_HPP_
#define OSWR_TRAJECTORY_HPP_

#include <Eigen/Core>
#include <vector>

#include "oswr/time_basis.hpp"

namespace oswr {

/// Piecewise-polynomial-in-time field. modes[j] is (components x intervals):
/// column n holds the Legendre coefficient of mode j on interval n.
struct PiecewiseField {
  TimePartition partition;
  int degree = 0;
  std::vector<Eigen::MatrixXd> modes;

  PiecewiseField() = default;
  PiecewiseField(TimePartition p, int d, Eigen::Index components);

  Eigen::Index components() const { return modes.empty() ? 0 : modes[0].rows(); }
  std::size_t intervals() const { return partition.intervals(); }

  /// Value at t_{n+1}^- (all Legendre modes equal 1 there).
  Eigen::VectorXd right_value(std::size_t n) const;
  /// Evaluates inside interval n.
  Eigen::VectorXd value_in(std::size_t n, double t) const;
  /// Left-continuous evaluation: at a breakpoint the limit from the left.
  Eigen::VectorXd operator()(double t) const;

  /// sqrt(sum_n sum_j |c_{n,j}|^2 k_n/(2j+1)): the L2(I) norm of the
  /// Euclidean component vector.
  double l2_norm() const;

  /// Coefficients of interval n as a list of vectors, one per mode.
  std::vector<Eigen::VectorXd> interval_coeffs(std::size_t n) const;
  void set_interval(std::size_t n, const std::vector<Eigen::VectorXd> &coeffs);
};

/// DG(d) solution trajectory over one window; `initial` is U(t_0^-).
struct DGTrajectory : PiecewiseField {
  Eigen::VectorXd initial;

  DGTrajectory() = default;
  DGTrajectory(TimePartition p, int d, const Eigen::VectorXd &u_init)
      : PiecewiseField(std::move(p), d, u_init.size()), initial(u_init) {}

  /// U(t_n^-) : the window initial value for n = 0.
  Eigen::VectorXd left_value(std::size_t n) const {
    return n == 0 ? initial : right_value(n - 1);
  }
  Eigen::VectorXd final_value() const { return right_value(intervals() - 1); }
  /// Left-continuous evaluation, including t = t_0 where it returns `initial`.
  Eigen::VectorXd evaluate(double t) const;
};

/// Transmission data: Legendre coefficients of interface functionals.
using InterfaceTrace = PiecewiseField;
/// Discrete interface flux of the mortar formulation.
using MortarFlux = PiecewiseField;

}  // namespace oswr

#endif  // OSWR_TRAJECTORY_HPP_

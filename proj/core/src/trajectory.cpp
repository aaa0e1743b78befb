#include "oswr/trajectory.hpp"

#include <cmath>

namespace oswr {

PiecewiseField::PiecewiseField(TimePartition p, int d, Eigen::Index components)
    : partition(std::move(p)), degree(d) {
  const auto n = static_cast<Eigen::Index>(partition.intervals());
  modes.assign(static_cast<std::size_t>(d) + 1, Eigen::MatrixXd::Zero(components, n));
}

Eigen::VectorXd PiecewiseField::right_value(std::size_t n) const {
  Eigen::VectorXd v = modes[0].col(static_cast<Eigen::Index>(n));
  for (std::size_t j = 1; j < modes.size(); ++j) v += modes[j].col(static_cast<Eigen::Index>(n));
  return v;
}

Eigen::VectorXd PiecewiseField::value_in(std::size_t n, double t) const {
  const double t_n = partition[n];
  const double k = partition.length(n);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(components());
  for (std::size_t j = 0; j < modes.size(); ++j) {
    v += legendre_eval(static_cast<int>(j), t_n, k, t) * modes[j].col(static_cast<Eigen::Index>(n));
  }
  return v;
}

Eigen::VectorXd PiecewiseField::operator()(double t) const {
  return value_in(partition.locate(t), t);
}

double PiecewiseField::l2_norm() const {
  double s = 0.0;
  for (std::size_t j = 0; j < modes.size(); ++j) {
    for (Eigen::Index n = 0; n < modes[j].cols(); ++n) {
      s += modes[j].col(n).squaredNorm() * partition.length(static_cast<std::size_t>(n)) /
           (2.0 * static_cast<double>(j) + 1.0);
    }
  }
  return std::sqrt(s);
}

std::vector<Eigen::VectorXd> PiecewiseField::interval_coeffs(std::size_t n) const {
  std::vector<Eigen::VectorXd> out;
  out.reserve(modes.size());
  for (const auto &m : modes) out.emplace_back(m.col(static_cast<Eigen::Index>(n)));
  return out;
}

void PiecewiseField::set_interval(std::size_t n, const std::vector<Eigen::VectorXd> &coeffs) {
  for (std::size_t j = 0; j < modes.size(); ++j) modes[j].col(static_cast<Eigen::Index>(n)) = coeffs[j];
}

Eigen::VectorXd DGTrajectory::evaluate(double t) const {
  if (t <= partition.start()) return initial;
  return (*this)(t);
}

}  // namespace oswr

#ifndef OSWR_TIME_PROJECTION_HPP_
#define OSWR_TIME_PROJECTION_HPP_

#include <Eigen/SparseCore>
#include <functional>
#include <vector>

#include "oswr/time_basis.hpp"
#include "oswr/trajectory.hpp"

namespace oswr {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Overlap integrals between the Legendre bases of two partitions of one
/// window. block(a, b) is (target intervals x source intervals) with entry
/// (n, m) = int Phi^source_{m,a} Phi^target_{n,b}.
struct ProjectionMatrices {
  int degree = 0;
  TimePartition source;
  TimePartition target;
  std::vector<SparseMatrix> blocks;

  const SparseMatrix &block(int alpha, int beta) const {
    return blocks[static_cast<std::size_t>(alpha * (degree + 1) + beta)];
  }
};

/// Single merge sweep over both breakpoint lists.
ProjectionMatrices build_projection_matrices(const TimePartition &source,
                                             const TimePartition &target, int d);

/// L2(window) projection of a piecewise P_d field on the source partition
/// onto P_d of the target partition (componentwise).
PiecewiseField apply_projection(const ProjectionMatrices &m, const PiecewiseField &source);

/// Cross-mesh integrals between 1D P1 nodal bases on two meshes of the same
/// segment: entry (k, l) = int w  a_k  b_l where a_k is the k-th target hat
/// (or its derivative) and b_l the l-th source hat (or its derivative). Node
/// lists must be increasing with identical end points.
SparseMatrix hat_overlap_matrix(const std::vector<double> &target_nodes,
                                const std::vector<double> &source_nodes,
                                bool target_derivative = false, bool source_derivative = false,
                                const std::function<double(double)> &weight = {});

}  // namespace oswr

#endif  // OSWR_TIME_PROJECTION_HPP_

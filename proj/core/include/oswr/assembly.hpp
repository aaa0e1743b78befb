#ifndef OSWR_ASSEMBLY_HPP_
#define OSWR_ASSEMBLY_HPP_

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <functional>
#include <map>
#include <vector>

#include "oswr/config.hpp"
#include "oswr/mesh.hpp"

namespace oswr {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Coefficient fields of one region.
struct Coefficients {
  Expression nu = Expression::constant(1.0);
  Expression bx;
  Expression by;
  Expression c;
  Expression omega = Expression::constant(1.0);

  static Coefficients of(const SubdomainSpec &s);
};

/// Element subset; null means every element.
using ElementSet = const std::vector<int> *;

/// int omega phi_k phi_l + sum over interfaces q int_Gamma phi_k phi_l.
SparseMatrix assemble_mass(const FemSpace &space, const Expression &omega,
                           const std::map<int, double> &interface_q = {},
                           ElementSet elements = nullptr);

/// Skew-symmetrised advection-diffusion-reaction form
///   1/2 int (b.grad u) v - (b.grad v) u + int nu grad u.grad v
///   + int (c + div b / 2) u v.
SparseMatrix assemble_atilde(const FemSpace &space, const Coefficients &k,
                             ElementSet elements = nullptr);

/// Advection part of assemble_atilde alone.
SparseMatrix assemble_advection(const FemSpace &space, const Coefficients &k,
                                ElementSet elements = nullptr);

/// int grad u . grad v.
SparseMatrix assemble_stiffness(const FemSpace &space, ElementSet elements = nullptr);

/// Absorbing closure int (p_ext - b.n/2) u v on exterior boundary faces.
SparseMatrix assemble_exterior_closure(const FemSpace &space, const Coefficients &k, double p_ext,
                                       ElementSet elements = nullptr);

/// Interface blocks in interface numbering (rows and columns follow
/// InterfaceDofs::dofs).
struct InterfaceOperators {
  int neighbour = 0;
  std::vector<int> dofs;
  std::vector<double> coords;
  double p = 0.0;
  double q = 0.0;
  SparseMatrix M_gamma;  ///< int phi psi
  SparseMatrix M_pbn;    ///< int (p - b.n/2) phi psi
  SparseMatrix M_bn;     ///< int (b.n) phi psi
  SparseMatrix B_r;      ///< -int r phi_l d_tau psi_k
  SparseMatrix K_s;      ///< int q s d_tau phi_l d_tau psi_k

  /// Time-independent part of the transmission form:
  /// M_pbn + q B_r + K_s.
  SparseMatrix static_block() const;
};

InterfaceOperators assemble_interface_ops(const FemSpace &space, int neighbour,
                                          const TransmissionSpec &params, const Coefficients &k);

/// Load vectors F_beta = int_{I_n} L_{n,beta}(s) (f(., s), phi) ds, beta = 0..d.
std::vector<Eigen::VectorXd> assemble_load(const FemSpace &space, const Expression &f,
                                           double t_n, double k_n, int d,
                                           ElementSet elements = nullptr);

/// int w phi_k phi_l over the mesh edges lying on the axis-aligned segment
/// {x_axis' = position, lo <= x_axis <= hi}; global numbering.
SparseMatrix assemble_segment_mass(const Mesh &mesh, int tangent_axis, double position,
                                   double lo, double hi,
                                   const std::function<double(double, double)> &weight);

/// E B E^T: embeds an interface block into the volume numbering.
SparseMatrix extend(const SparseMatrix &block, const std::vector<int> &dofs, Eigen::Index n);

/// Nodal interpolant of an expression at time t.
Eigen::VectorXd interpolate(const FemSpace &space, const Expression &u, double t = 0.0);

}  // namespace oswr

#endif  // OSWR_ASSEMBLY_HPP_

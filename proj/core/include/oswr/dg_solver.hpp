#ifndef OSWR_DG_SOLVER_HPP_
#define OSWR_DG_SOLVER_HPP_

#include <Eigen/Core>
#include <map>
#include <memory>
#include <utility>
#include <vector>

#include "oswr/assembly.hpp"
#include "oswr/config.hpp"
#include "oswr/linear_solver.hpp"
#include "oswr/trajectory.hpp"

namespace oswr {

/// How a subdomain couples to its interface data.
enum class Coupling {
  conforming,  ///< interface data tested against the subdomain's own traces
  mortar,      ///< flux unknown Q on the full P1 trace space
};

/// Everything a subdomain needs to advance in time.
struct SubdomainOperators {
  int id = 0;
  int degree = 1;
  FemSpace space;
  Coefficients coeffs;
  Expression f;
  SparseMatrix mass_volume;  ///< int omega u v
  SparseMatrix a_volume;     ///< atilde + exterior closure
  std::vector<InterfaceOperators> interfaces;

  /// Conforming-trace system: mass with q-weighted interface mass and
  /// atilde with the static transmission blocks.
  SparseMatrix M;
  SparseMatrix A;
  /// Mortar volume operator: atilde + closure + 1/2 int (b.n) u v on the
  /// interfaces.
  SparseMatrix A_mortar;

  Eigen::Index ndofs() const { return static_cast<Eigen::Index>(space.ndofs()); }
  const InterfaceOperators &interface(int neighbour) const;
};

/// Assembles the operators of subdomain `spec` on `space` (whose interfaces
/// must already be tagged). Transmission parameters come from the sections
/// (spec.id -> neighbour).
SubdomainOperators assemble_subdomain(const ExperimentConfig &cfg, const SubdomainSpec &spec,
                                      FemSpace space);

/// Single-subdomain operators without interfaces (exterior closure
/// everywhere).
SubdomainOperators assemble_single(const ExperimentConfig &cfg, const SubdomainSpec &spec);

/// DG(d) system matrix for one interval: block (j, k) = A[k][j] M +
/// delta_jk ||L_j||^2 A.
SparseMatrix dg_system_matrix(const SparseMatrix &M, const SparseMatrix &A, int d, double k);

/// Backward-Euler-like DG(0) step: (M + k A) U = M U_prev + F0 + k G0.
Eigen::VectorXd step_d0(const SparseMatrix &M, const SparseMatrix &A,
                        const Eigen::VectorXd &u_prev, double k, const Eigen::VectorXd &f0,
                        const Eigen::VectorXd &g0);

/// DG(1) step returning the Legendre coefficients (U_0, U_1).
std::pair<Eigen::VectorXd, Eigen::VectorXd> step_d1(
    const SparseMatrix &M, const SparseMatrix &A, const Eigen::VectorXd &u_prev, double k,
    const Eigen::VectorXd &f0, const Eigen::VectorXd &f1, const Eigen::VectorXd &g0,
    const Eigen::VectorXd &g1);

/// Interface data per neighbour id.
using TraceMap = std::map<int, InterfaceTrace>;
using FluxMap = std::map<int, MortarFlux>;

/// Local solver of one subdomain. Factorizations are cached per step size;
/// one instance must not be used from two threads at once.
class LocalSolver {
 public:
  LocalSolver(std::shared_ptr<const SubdomainOperators> ops, Coupling coupling);

  const SubdomainOperators &operators() const { return *ops_; }
  Coupling coupling() const { return coupling_; }

  /// Source loads per mode, (ndofs x intervals) each; empty when f is zero.
  std::vector<Eigen::MatrixXd> loads(const TimePartition &partition) const;

  /// Conforming-trace path. Traces must live on `partition`; a missing
  /// neighbour means zero data.
  DGTrajectory solve_window(const TraceMap &traces, const TimePartition &partition,
                            const Eigen::VectorXd &u_init,
                            const std::vector<Eigen::MatrixXd> *loads = nullptr);

  /// Mortar path: returns the trajectory and the flux per interface.
  std::pair<DGTrajectory, FluxMap> solve_window_mortar(
      const TraceMap &traces, const TimePartition &partition, const Eigen::VectorXd &u_init,
      const std::vector<Eigen::MatrixXd> *loads = nullptr);

 private:
  const LinearSolver &solver_for(double k);

  std::shared_ptr<const SubdomainOperators> ops_;
  Coupling coupling_;
  std::vector<std::pair<double, std::unique_ptr<LinearSolver>>> cache_;
};

}  // namespace oswr

#endif  // OSWR_DG_SOLVER_HPP_

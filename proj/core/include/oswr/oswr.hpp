#ifndef OSWR_OSWR_HPP_
#define OSWR_OSWR_HPP_

#include <memory>
#include <optional>
#include <vector>

#include "oswr/config.hpp"
#include "oswr/dg_solver.hpp"
#include "oswr/error.hpp"
#include "oswr/time_projection.hpp"

namespace oswr {

/// Precomputed data of the directed exchange j -> i: everything needed to
/// build the data of subdomain i from the iterate of subdomain j.
struct TransmissionLink {
  std::size_t target = 0;  ///< index of i
  std::size_t source = 0;  ///< index of j
  int target_id = 0;
  int source_id = 0;
  std::vector<int> source_dofs;  ///< interface dofs of j

  /// Conforming traces: (p_ij + p_ji) M + q_ij B_r^ij + K_s^ij + q_ji B_r^ji
  /// + K_s^ji and (q_ij + q_ji) M, in the shared interface numbering.
  SparseMatrix static_sum;
  SparseMatrix dt_sum;

  /// Mortar: cross-mesh matrices, rows on the trace space of i, columns on
  /// the trace space of j.
  SparseMatrix cross_mass;    ///< int psi^i chi^j
  SparseMatrix cross_static;  ///< int (b_j.n_j + p_ij) psi chi + q_ij B_r + K_s
  double q_ij = 0.0;
};

/// Assembled multidomain problem: decomposition, local solvers and links.
class MultidomainProblem {
 public:
  /// Validates the configuration. Without an explicit coupling the conforming
  /// formulation is used when all interface meshes match, mortar otherwise.
  explicit MultidomainProblem(const ExperimentConfig &cfg,
                              std::optional<Coupling> coupling = std::nullopt);

  const ExperimentConfig &config() const { return cfg_; }
  Coupling coupling() const { return coupling_; }
  std::size_t size() const { return ops_.size(); }
  int degree() const { return cfg_.subdomains.front().degree; }
  const SubdomainOperators &operators(std::size_t s) const { return *ops_[s]; }
  LocalSolver &solver(std::size_t s) { return solvers_[s]; }
  const std::vector<TransmissionLink> &links() const { return links_; }
  std::size_t index_of(int id) const;

  std::pair<double, double> window(int w) const;
  TimePartition window_partition(std::size_t s, int w) const;
  /// Nodal interpolant of u0 on subdomain s.
  Eigen::VectorXd initial_value(std::size_t s) const;

 private:
  ExperimentConfig cfg_;
  Coupling coupling_ = Coupling::conforming;
  std::vector<std::shared_ptr<const SubdomainOperators>> ops_;
  std::vector<LocalSolver> solvers_;
  std::vector<TransmissionLink> links_;
};

/// Splits a global partition at window boundaries; throws ValidationError when
/// a boundary is not a breakpoint.
std::vector<TimePartition> split_at_windows(const TimePartition &global,
                                            const std::vector<double> &boundaries);

/// Initial transmission data of subdomain s on `partition`: zero, or the
/// constant-in-time functionals (p M + q B_r + K_s) u_init|Gamma in mode 0.
TraceMap initial_guess(InitialGuess strategy, const SubdomainOperators &ops,
                       const TimePartition &partition, const Eigen::VectorXd &u_init);

/// New data of the link's target subdomain i from the iterate of j:
/// g~ = -g_ji + (S_ij + S_ji) U_j (conforming) or -M Q_j + (M_b + q B_r + K_s)
/// U_j + q M d_t(I U_j) (mortar), computed on T_j and projected onto T_i.
InterfaceTrace transmission_update(const TransmissionLink &link, const InterfaceTrace &g_old,
                                   const DGTrajectory &u_j, const MortarFlux *q_j,
                                   const ProjectionMatrices &projection);

/// Discrete L2((0,T) x Gamma) norm of g_new - g_old relative to `scale`, or
/// to the norm of g_new when scale is not given (absolute if that is zero).
double interface_residual(const InterfaceTrace &g_new, const InterfaceTrace &g_old,
                          std::optional<double> scale = std::nullopt);

struct IterationRecord {
  int iteration = 0;
  double residual = 0.0;
  std::vector<double> solution_norms;    ///< L2(I; L2_M) per subdomain
  std::vector<double> solution_changes;  ///< against the previous iterate
  double wall_seconds = 0.0;
};

struct IterationHistory {
  std::vector<IterationRecord> records;
  bool converged = false;

  int iterations() const { return static_cast<int>(records.size()); }
  double last_residual() const { return records.empty() ? 0.0 : records.back().residual; }
};

/// Divergence or a non-finite residual; carries the history so far.
class IterationError : public SolverError {
 public:
  IterationError(const std::string &message, double residual, IterationHistory history)
      : SolverError(message, residual), history_(std::move(history)) {}
  const IterationHistory &history() const { return history_; }

 private:
  IterationHistory history_;
};

struct IterateOptions {
  int max_iterations = 50;
  double tolerance = 1e-8;
  /// Concurrent subdomain solves; 0 reads OSWR_THREADS, default = subdomains.
  int threads = 0;
  double divergence_factor = 1e6;
};

struct IterateResult {
  std::vector<DGTrajectory> solutions;
  std::vector<FluxMap> fluxes;      ///< empty maps on the conforming path
  std::vector<TraceMap> traces;     ///< data after the last exchange
  IterationHistory history;
};

/// Jacobi OSWR iteration on window w. `initial` holds the data of every
/// subdomain on its window partition.
IterateResult iterate(MultidomainProblem &problem, int w,
                      const std::vector<Eigen::VectorXd> &u_init,
                      const std::vector<TraceMap> &initial, const IterateOptions &options);

struct MultidomainSolution {
  /// windows[s][w]: trajectory of subdomain s in window w.
  std::vector<std::vector<DGTrajectory>> windows;
  std::vector<IterationHistory> histories;
  std::vector<TraceMap> final_traces;

  /// Left-continuous value of subdomain s at t.
  Eigen::VectorXd evaluate(std::size_t s, double t) const;
  Eigen::VectorXd final_value(std::size_t s) const { return windows[s].back().final_value(); }
};

/// Runs every window in sequence with the configured iteration budget.
MultidomainSolution run_windows(MultidomainProblem &problem, const IterateOptions &options);
MultidomainSolution run_windows(const ExperimentConfig &cfg);

/// Number of concurrent solves from OSWR_THREADS (or `fallback`).
int thread_budget(int fallback);

}  // namespace oswr

#endif  // OSWR_OSWR_HPP_

#ifndef OSWR_ANALYSIS_HPP_
#define OSWR_ANALYSIS_HPP_

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "oswr/oswr.hpp"

namespace oswr {

/// Global rectilinear space grid and time grid of a reference solve.
struct ReferenceGrid {
  std::vector<double> xs;
  std::vector<double> ys;  ///< empty in 1D
  TimePartition time;
};

/// Grid containing every subdomain grid of `cfg`: per axis segment and for
/// time, the smallest common refinement multiplied up to at least
/// `space_factor` (resp. `time_factor`) times the finest count.
ReferenceGrid reference_grid(const ExperimentConfig &cfg, int space_factor, int time_factor);

struct MonodomainSolution {
  FemSpace space;
  DGTrajectory trajectory;
  std::vector<int> region;  ///< subdomain index per element
};

/// DG(d) x P1 solve on the whole box in one window, coefficients taken per
/// element from the subdomain containing its centroid.
MonodomainSolution solve_monodomain(const ExperimentConfig &cfg, const ReferenceGrid &grid);

struct SubdomainErrors {
  double e_inf = 0.0;   ///< L_inf(I; L2(Omega_i))
  double e_l2 = 0.0;    ///< L2(I; L2(Omega_i))
  double e_T_l2 = 0.0;  ///< L2(Omega_i) at t = T
  double e_T_h1 = 0.0;  ///< H1(Omega_i) at t = T
};

struct ErrorReport {
  std::vector<SubdomainErrors> subdomains;
};

/// Errors of a multidomain solution against a reference on a nested grid.
/// Throws ValidationError for non-nested grids.
ErrorReport error_norms(const MultidomainProblem &problem, const MultidomainSolution &solution,
                        const MonodomainSolution &reference);

/// Same norms between two multidomain solutions of the same problem
/// geometry, sampled on `time` (which must refine both time grids).
ErrorReport solution_difference(const MultidomainProblem &problem, const MultidomainSolution &a,
                                const MultidomainSolution &b, const TimePartition &time);

/// Negated least-squares slope of log2(errors) against the level index.
double fit_slope(const std::vector<double> &errors);

enum class StudyAxis { time, space, spacetime };

struct StudyOptions {
  StudyAxis axis = StudyAxis::time;
  int levels = 3;
  int refine_ratio = 2;
  int reference_factor = 4;
  double tolerance = 1e-10;
  int max_iterations = 200;
  std::optional<Coupling> coupling;
};

struct StudyRow {
  int level = 0;
  std::vector<double> h;  ///< per subdomain
  std::vector<double> k;
  std::vector<SubdomainErrors> errors;
  int iterations = 0;
  bool converged = false;
};

struct StudyTable {
  std::vector<int> ids;
  std::vector<StudyRow> rows;
  std::vector<SubdomainErrors> slopes;  ///< fitted orders per subdomain
};

/// Refines the configured grids level by level, runs OSWR to the study
/// tolerance and measures errors against one reference solve.
StudyTable convergence_study(const ExperimentConfig &cfg, const StudyOptions &options);

/// Config of refinement level `level` along `axis`.
ExperimentConfig refine(const ExperimentConfig &cfg, StudyAxis axis, int level, int ratio);

enum class SweepMode {
  error,  ///< f = 0, u0 = 0, seeded random initial data
  full,   ///< the configured problem and initial guess
};

struct SweepOptions {
  std::vector<double> p_values;
  std::vector<double> q_values{0.0};
  SweepMode mode = SweepMode::error;
  std::uint64_t seed = 1;
  double target = 1e-6;
  int max_iterations = 50;
  std::optional<Coupling> coupling;
};

struct SweepRow {
  double p = 0.0;
  double q = 0.0;
  int iterations = 0;
  bool converged = false;
  bool best = false;
};

/// Iterations to reach the target residual in the first window for every
/// (p, q) pair, applied to all directed interfaces.
std::vector<SweepRow> sweep_parameters(const ExperimentConfig &cfg, const SweepOptions &options);

/// Uniform(-1, 1) transmission data for subdomain s.
TraceMap random_traces(const SubdomainOperators &ops, const TimePartition &partition,
                       std::mt19937_64 &rng);

}  // namespace oswr

#endif  // OSWR_ANALYSIS_HPP_

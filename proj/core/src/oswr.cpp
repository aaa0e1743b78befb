#include "oswr/oswr.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <future>
#include <string>

#include "oswr/validate.hpp"

namespace oswr {

namespace {

bool same_nodes(const std::vector<double> &a, const std::vector<double> &b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::abs(a[i] - b[i]) > 1e-12 * std::max(1.0, std::abs(a[i]))) return false;
  }
  return true;
}

/// Rows of a (ndofs x intervals) mode matrix restricted to interface dofs.
Eigen::MatrixXd restrict_rows(const Eigen::MatrixXd &m, const std::vector<int> &dofs) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(dofs.size()), m.cols());
  for (std::size_t a = 0; a < dofs.size(); ++a) out.row(static_cast<Eigen::Index>(a)) = m.row(dofs[a]);
  return out;
}

/// Trace modes of U on `dofs` and Legendre modes of d/dt (I U).
void trace_and_derivative(const DGTrajectory &u, const std::vector<int> &dofs,
                          std::vector<Eigen::MatrixXd> &trace, std::vector<Eigen::MatrixXd> &dt) {
  const int d = u.degree;
  trace.clear();
  for (int j = 0; j <= d; ++j) trace.push_back(restrict_rows(u.modes[j], dofs));
  const Eigen::Index ng = static_cast<Eigen::Index>(dofs.size());
  const Eigen::Index nt = static_cast<Eigen::Index>(u.intervals());
  Eigen::MatrixXd left(ng, nt);
  for (std::size_t a = 0; a < dofs.size(); ++a) left(static_cast<Eigen::Index>(a), 0) = u.initial[dofs[a]];
  for (Eigen::Index n = 1; n < nt; ++n) {
    left.col(n).setZero();
    for (int j = 0; j <= d; ++j) left.col(n) += trace[j].col(n - 1);
  }
  dt.assign(static_cast<std::size_t>(d) + 1, Eigen::MatrixXd(ng, nt));
  for (Eigen::Index n = 0; n < nt; ++n) {
    const double k = u.partition.length(static_cast<std::size_t>(n));
    std::vector<Eigen::VectorXd> c;
    for (int j = 0; j <= d; ++j) c.emplace_back(trace[j].col(n));
    const Eigen::VectorXd l = left.col(n);
    const auto der = lift_derivative(c, l, k);
    for (int j = 0; j <= d; ++j) dt[j].col(n) = der[j];
  }
}

double solution_norm(const DGTrajectory &u, const SparseMatrix &mass) {
  double s = 0.0;
  for (std::size_t j = 0; j < u.modes.size(); ++j) {
    for (Eigen::Index n = 0; n < u.modes[j].cols(); ++n) {
      const Eigen::VectorXd c = u.modes[j].col(n);
      s += c.dot(mass * c) * u.partition.length(static_cast<std::size_t>(n)) / (2.0 * j + 1.0);
    }
  }
  return std::sqrt(std::max(s, 0.0));
}

DGTrajectory difference(const DGTrajectory &a, const DGTrajectory &b) {
  DGTrajectory d = a;
  for (std::size_t j = 0; j < d.modes.size(); ++j) d.modes[j] -= b.modes[j];
  d.initial -= b.initial;
  return d;
}

}  // namespace

int thread_budget(int fallback) {
  if (const char *env = std::getenv("OSWR_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  return std::max(1, fallback);
}

MultidomainProblem::MultidomainProblem(const ExperimentConfig &cfg,
                                       std::optional<Coupling> coupling)
    : cfg_(cfg) {
  require_valid(validate_problem(cfg_));
  const auto pairs = adjacent_pairs(cfg_);

  std::vector<FemSpace> spaces;
  for (const auto &s : cfg_.subdomains) {
    std::vector<std::pair<int, Box>> neighbours;
    for (const auto &[a, b] : pairs) {
      if (a == s.id) neighbours.emplace_back(b, cfg_.subdomain(b).box);
      if (b == s.id) neighbours.emplace_back(a, cfg_.subdomain(a).box);
    }
    Mesh mesh = build_mesh(s.box, s.nx, s.ny);
    tag_interfaces(mesh, neighbours);
    spaces.push_back(make_space(std::move(mesh)));
  }

  bool matching = true;
  for (const auto &[a, b] : pairs) {
    const auto &ia = spaces[index_of(a)].interface(b);
    const auto &ib = spaces[index_of(b)].interface(a);
    if (!same_nodes(ia.coords, ib.coords)) matching = false;
  }
  coupling_ = coupling.value_or(matching ? Coupling::conforming : Coupling::mortar);
  if (coupling_ == Coupling::conforming && !matching) {
    throw ValidationError("nonmatching interface meshes require the mortar coupling");
  }

  for (std::size_t s = 0; s < cfg_.subdomains.size(); ++s) {
    auto ops = std::make_shared<const SubdomainOperators>(
        assemble_subdomain(cfg_, cfg_.subdomains[s], std::move(spaces[s])));
    ops_.push_back(ops);
    solvers_.emplace_back(ops, coupling_);
  }

  for (const auto &[a, b] : pairs) {
    for (const auto &[i_id, j_id] : {std::make_pair(a, b), std::make_pair(b, a)}) {
      TransmissionLink link;
      link.target = index_of(i_id);
      link.source = index_of(j_id);
      link.target_id = i_id;
      link.source_id = j_id;
      const SubdomainOperators &oi = *ops_[link.target];
      const SubdomainOperators &oj = *ops_[link.source];
      const InterfaceOperators &si = oi.interface(j_id);  // S_ij on the mesh of i
      const InterfaceOperators &sj = oj.interface(i_id);  // S_ji on the mesh of j
      const TransmissionSpec &pij = *cfg_.transmission(i_id, j_id);
      link.source_dofs = sj.dofs;
      link.q_ij = pij.q;
      if (coupling_ == Coupling::conforming) {
        link.static_sum = (si.p + sj.p) * sj.M_gamma + si.q * si.B_r + si.K_s +
                          sj.q * sj.B_r + sj.K_s;
        link.dt_sum = (si.q + sj.q) * sj.M_gamma;
      } else {
        const InterfaceDofs &di = oi.space.interface(j_id);
        const InterfaceDofs &dj = oj.space.interface(i_id);
        const Coefficients &kj = oj.coeffs;
        const auto &node = oi.space.mesh.nodes[static_cast<std::size_t>(di.dofs.front())];
        const int axis = di.axis;
        auto point = [&](double tau) {
          std::array<double, 2> p = node;
          if (axis >= 0) p[static_cast<std::size_t>(axis)] = tau;
          return p;
        };
        auto bn_j = [&](double tau) {
          const auto p = point(tau);
          const double by = cfg_.domain.dim == 2 ? kj.by(p[0], p[1]) * dj.normal[1] : 0.0;
          return kj.bx(p[0], p[1]) * dj.normal[0] + by;
        };
        if (axis < 0) {
          Eigen::Triplet<double> one(0, 0, 1.0);
          link.cross_mass.resize(1, 1);
          link.cross_mass.setFromTriplets(&one, &one + 1);
          Eigen::Triplet<double> st(0, 0, bn_j(0.0) + pij.p);
          link.cross_static.resize(1, 1);
          link.cross_static.setFromTriplets(&st, &st + 1);
        } else {
          link.cross_mass = hat_overlap_matrix(di.coords, dj.coords);
          link.cross_static =
              hat_overlap_matrix(di.coords, dj.coords, false, false,
                                 [&](double tau) { return bn_j(tau) + pij.p; });
          if (pij.q != 0.0) {
            const Expression r = pij.r;
            link.cross_static += pij.q * hat_overlap_matrix(di.coords, dj.coords, true, false,
                                                            [&](double tau) {
                                                              const auto p = point(tau);
                                                              return -r(p[0], p[1]);
                                                            });
            link.cross_static +=
                pij.q * pij.s * hat_overlap_matrix(di.coords, dj.coords, true, true);
          }
        }
      }
      links_.push_back(std::move(link));
    }
  }
}

std::size_t MultidomainProblem::index_of(int id) const {
  for (std::size_t s = 0; s < cfg_.subdomains.size(); ++s) {
    if (cfg_.subdomains[s].id == id) return s;
  }
  throw ValidationError("no subdomain with id " + std::to_string(id));
}

std::pair<double, double> MultidomainProblem::window(int w) const {
  const double a = cfg_.T * w / cfg_.windows;
  const double b = w + 1 == cfg_.windows ? cfg_.T : cfg_.T * (w + 1) / cfg_.windows;
  return {a, b};
}

TimePartition MultidomainProblem::window_partition(std::size_t s, int w) const {
  const auto [a, b] = window(w);
  return TimePartition::uniform(a, b, cfg_.subdomains[s].nt);
}

Eigen::VectorXd MultidomainProblem::initial_value(std::size_t s) const {
  return interpolate(ops_[s]->space, cfg_.u0, 0.0);
}

std::vector<TimePartition> split_at_windows(const TimePartition &global,
                                            const std::vector<double> &boundaries) {
  const auto &t = global.breakpoints();
  std::vector<TimePartition> out;
  std::size_t pos = 0;
  for (std::size_t w = 0; w + 1 < boundaries.size(); ++w) {
    const double a = boundaries[w], b = boundaries[w + 1];
    const double tol = 1e-12 * (global.end() - global.start());
    if (std::abs(t[pos] - a) > tol) throw ValidationError("window boundary is not a breakpoint");
    std::vector<double> part{t[pos]};
    while (pos + 1 < t.size() && t[pos + 1] <= b + tol) part.push_back(t[++pos]);
    if (std::abs(part.back() - b) > tol || part.size() < 2) {
      throw ValidationError("window boundaries are not nested in the time grid");
    }
    out.emplace_back(std::move(part));
  }
  if (pos + 1 != t.size()) throw ValidationError("windows do not cover the time grid");
  return out;
}

TraceMap initial_guess(InitialGuess strategy, const SubdomainOperators &ops,
                       const TimePartition &partition, const Eigen::VectorXd &u_init) {
  TraceMap out;
  for (const auto &io : ops.interfaces) {
    InterfaceTrace g(partition, ops.degree, static_cast<Eigen::Index>(io.dofs.size()));
    if (strategy == InitialGuess::from_u0) {
      Eigen::VectorXd trace(static_cast<Eigen::Index>(io.dofs.size()));
      for (std::size_t a = 0; a < io.dofs.size(); ++a) trace[static_cast<Eigen::Index>(a)] = u_init[io.dofs[a]];
      const SparseMatrix s = io.p * io.M_gamma + io.q * io.B_r + io.K_s;
      const Eigen::VectorXd v = s * trace;
      g.modes[0].colwise() = v;
    }
    out.emplace(io.neighbour, std::move(g));
  }
  return out;
}

InterfaceTrace transmission_update(const TransmissionLink &link, const InterfaceTrace &g_old,
                                   const DGTrajectory &u_j, const MortarFlux *q_j,
                                   const ProjectionMatrices &projection) {
  if (!(u_j.partition == projection.source)) {
    throw ValidationError("iterate does not live on the projection source grid");
  }
  std::vector<Eigen::MatrixXd> trace, dt;
  trace_and_derivative(u_j, link.source_dofs, trace, dt);
  const int d = u_j.degree;
  const bool mortar = link.cross_mass.size() != 0;
  const Eigen::Index rows = mortar ? link.cross_mass.rows() : static_cast<Eigen::Index>(link.source_dofs.size());
  InterfaceTrace tilde(u_j.partition, d, rows);
  for (int j = 0; j <= d; ++j) {
    if (mortar) {
      if (!q_j) throw ValidationError("mortar update needs the neighbour flux");
      tilde.modes[j] = -(link.cross_mass * q_j->modes[j]) + link.cross_static * trace[j] +
                       link.q_ij * (link.cross_mass * dt[j]);
    } else {
      if (!(g_old.partition == u_j.partition) || g_old.components() != rows) {
        throw ValidationError("interface data does not match the neighbour grid");
      }
      tilde.modes[j] = -g_old.modes[j] + link.static_sum * trace[j] + link.dt_sum * dt[j];
    }
  }
  return apply_projection(projection, tilde);
}

double interface_residual(const InterfaceTrace &g_new, const InterfaceTrace &g_old,
                          std::optional<double> scale) {
  if (!(g_new.partition == g_old.partition) || g_new.components() != g_old.components() ||
      g_new.degree != g_old.degree) {
    throw ValidationError("interface residual of traces on different grids");
  }
  InterfaceTrace diff = g_new;
  for (std::size_t j = 0; j < diff.modes.size(); ++j) diff.modes[j] -= g_old.modes[j];
  const double num = diff.l2_norm();
  const double den = scale ? *scale : g_new.l2_norm();
  return den > 0.0 ? num / den : num;
}

IterateResult iterate(MultidomainProblem &problem, int w,
                      const std::vector<Eigen::VectorXd> &u_init,
                      const std::vector<TraceMap> &initial, const IterateOptions &options) {
  const std::size_t ns = problem.size();
  const bool mortar = problem.coupling() == Coupling::mortar;
  std::vector<TimePartition> parts;
  std::vector<std::vector<Eigen::MatrixXd>> loads;
  for (std::size_t s = 0; s < ns; ++s) {
    parts.push_back(problem.window_partition(s, w));
    loads.push_back(problem.solver(s).loads(parts.back()));
  }
  std::vector<ProjectionMatrices> proj;
  std::vector<double> initial_norm;
  for (const auto &link : problem.links()) {
    proj.push_back(build_projection_matrices(parts[link.source], parts[link.target],
                                             problem.degree()));
    initial_norm.push_back(initial[link.target].at(link.source_id).l2_norm());
  }

  IterateResult res;
  res.traces = initial;
  res.solutions.resize(ns);
  res.fluxes.resize(ns);
  std::vector<DGTrajectory> previous;
  const int threads = options.threads > 0 ? options.threads
                                          : thread_budget(static_cast<int>(ns));

  auto solve_one = [&](std::size_t s) {
    LocalSolver &solver = problem.solver(s);
    if (mortar) {
      auto [u, q] = solver.solve_window_mortar(res.traces[s], parts[s], u_init[s], &loads[s]);
      res.solutions[s] = std::move(u);
      res.fluxes[s] = std::move(q);
    } else {
      res.solutions[s] = solver.solve_window(res.traces[s], parts[s], u_init[s], &loads[s]);
    }
  };

  double first = -1.0;
  for (int it = 1; it <= options.max_iterations; ++it) {
    const auto t0 = std::chrono::steady_clock::now();
    if (threads <= 1 || ns == 1) {
      for (std::size_t s = 0; s < ns; ++s) solve_one(s);
    } else {
      for (std::size_t s0 = 0; s0 < ns; s0 += static_cast<std::size_t>(threads)) {
        std::vector<std::future<void>> jobs;
        for (std::size_t s = s0; s < std::min(ns, s0 + static_cast<std::size_t>(threads)); ++s) {
          jobs.push_back(std::async(std::launch::async, solve_one, s));
        }
        for (auto &j : jobs) j.get();
      }
    }

    std::vector<TraceMap> next = res.traces;
    double residual = 0.0;
    for (std::size_t l = 0; l < problem.links().size(); ++l) {
      const TransmissionLink &link = problem.links()[l];
      const InterfaceTrace &g_old_source = res.traces[link.source].at(link.target_id);
      const MortarFlux *q = mortar ? &res.fluxes[link.source].at(link.target_id) : nullptr;
      InterfaceTrace g = transmission_update(link, g_old_source, res.solutions[link.source], q,
                                             proj[l]);
      const InterfaceTrace &g_old = res.traces[link.target].at(link.source_id);
      const double scale = std::max(g.l2_norm(), initial_norm[l]);
      residual = std::max(residual, interface_residual(g, g_old, scale));
      next[link.target].at(link.source_id) = std::move(g);
    }
    res.traces = std::move(next);

    IterationRecord rec;
    rec.iteration = it;
    rec.residual = residual;
    for (std::size_t s = 0; s < ns; ++s) {
      const SparseMatrix &m = problem.operators(s).mass_volume;
      rec.solution_norms.push_back(solution_norm(res.solutions[s], m));
      rec.solution_changes.push_back(
          previous.empty() ? rec.solution_norms.back()
                           : solution_norm(difference(res.solutions[s], previous[s]), m));
    }
    rec.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    res.history.records.push_back(std::move(rec));
    previous = res.solutions;

    if (!std::isfinite(residual)) {
      throw IterationError("non-finite interface residual", residual, res.history);
    }
    if (first < 0.0) first = residual;
    if (first > 0.0 && residual > options.divergence_factor * first) {
      throw IterationError("OSWR iteration diverged", residual, res.history);
    }
    if (residual <= options.tolerance) {
      res.history.converged = true;
      break;
    }
  }
  return res;
}

Eigen::VectorXd MultidomainSolution::evaluate(std::size_t s, double t) const {
  const auto &ws = windows[s];
  for (const auto &traj : ws) {
    if (t <= traj.partition.end()) return traj.evaluate(t);
  }
  return ws.back().final_value();
}

MultidomainSolution run_windows(MultidomainProblem &problem, const IterateOptions &options) {
  const ExperimentConfig &cfg = problem.config();
  const std::size_t ns = problem.size();
  MultidomainSolution sol;
  sol.windows.resize(ns);
  std::vector<Eigen::VectorXd> u(ns);
  for (std::size_t s = 0; s < ns; ++s) u[s] = problem.initial_value(s);
  for (int w = 0; w < cfg.windows; ++w) {
    std::vector<TraceMap> init;
    for (std::size_t s = 0; s < ns; ++s) {
      init.push_back(initial_guess(cfg.initial_guess, problem.operators(s),
                                   problem.window_partition(s, w), u[s]));
    }
    IterateResult r = iterate(problem, w, u, init, options);
    for (std::size_t s = 0; s < ns; ++s) {
      u[s] = r.solutions[s].final_value();
      sol.windows[s].push_back(std::move(r.solutions[s]));
    }
    sol.histories.push_back(std::move(r.history));
    sol.final_traces = std::move(r.traces);
  }
  return sol;
}

MultidomainSolution run_windows(const ExperimentConfig &cfg) {
  MultidomainProblem problem(cfg);
  IterateOptions opts;
  opts.max_iterations = cfg.max_iterations;
  opts.tolerance = cfg.tolerance;
  return run_windows(problem, opts);
}

}  // namespace oswr

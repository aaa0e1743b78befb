#include "oswr/dg_solver.hpp"

#include <cmath>
#include <string>

#include "oswr/error.hpp"

namespace oswr {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

void append(Triplets &t, const SparseMatrix &m, Eigen::Index row0, Eigen::Index col0,
            double scale) {
  if (scale == 0.0) return;
  for (int k = 0; k < m.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(m, k); it; ++it) {
      t.emplace_back(static_cast<int>(row0 + it.row()), static_cast<int>(col0 + it.col()),
                     scale * it.value());
    }
  }
}

/// Restriction E^T as a sparse (n_gamma x n) matrix.
SparseMatrix restriction(const std::vector<int> &dofs, Eigen::Index n) {
  Triplets t;
  for (std::size_t i = 0; i < dofs.size(); ++i) t.emplace_back(static_cast<int>(i), dofs[i], 1.0);
  SparseMatrix r(static_cast<Eigen::Index>(dofs.size()), n);
  r.setFromTriplets(t.begin(), t.end());
  return r;
}

double sign(int j) { return j % 2 == 0 ? 1.0 : -1.0; }

}  // namespace

const InterfaceOperators &SubdomainOperators::interface(int neighbour) const {
  for (const auto &i : interfaces) {
    if (i.neighbour == neighbour) return i;
  }
  throw ValidationError("subdomain " + std::to_string(id) + " has no interface with " +
                        std::to_string(neighbour));
}

SubdomainOperators assemble_subdomain(const ExperimentConfig &cfg, const SubdomainSpec &spec,
                                      FemSpace space) {
  SubdomainOperators ops;
  ops.id = spec.id;
  ops.degree = spec.degree;
  ops.coeffs = Coefficients::of(spec);
  ops.f = cfg.f;
  ops.space = std::move(space);
  const Eigen::Index n = ops.ndofs();
  ops.mass_volume = assemble_mass(ops.space, spec.omega);
  ops.a_volume = assemble_atilde(ops.space, ops.coeffs) +
                 assemble_exterior_closure(ops.space, ops.coeffs, cfg.exterior_p);
  ops.M = ops.mass_volume;
  ops.A = ops.a_volume;
  ops.A_mortar = ops.a_volume;
  for (const auto &itf : ops.space.interfaces) {
    const TransmissionSpec *params = cfg.transmission(spec.id, itf.neighbour);
    if (!params) {
      throw ValidationError("missing transmission section from " + std::to_string(spec.id) +
                            " to " + std::to_string(itf.neighbour));
    }
    InterfaceOperators io = assemble_interface_ops(ops.space, itf.neighbour, *params, ops.coeffs);
    if (io.q != 0.0) ops.M += io.q * extend(io.M_gamma, io.dofs, n);
    ops.A += extend(io.static_block(), io.dofs, n);
    ops.A_mortar += 0.5 * extend(io.M_bn, io.dofs, n);
    ops.interfaces.push_back(std::move(io));
  }
  return ops;
}

SubdomainOperators assemble_single(const ExperimentConfig &cfg, const SubdomainSpec &spec) {
  Mesh mesh = build_mesh(spec.box, spec.nx, spec.ny);
  return assemble_subdomain(cfg, spec, make_space(std::move(mesh)));
}

SparseMatrix dg_system_matrix(const SparseMatrix &M, const SparseMatrix &A, int d, double k) {
  const IntervalBasis basis = build_interval_basis(d, k);
  const Eigen::Index n = M.rows();
  Triplets t;
  for (int j = 0; j <= d; ++j) {
    for (int m = 0; m <= d; ++m) append(t, M, j * n, m * n, basis.A[m][j]);
    append(t, A, j * n, j * n, basis.norm2[j]);
  }
  SparseMatrix s((d + 1) * n, (d + 1) * n);
  s.setFromTriplets(t.begin(), t.end());
  return s;
}

Eigen::VectorXd step_d0(const SparseMatrix &M, const SparseMatrix &A,
                        const Eigen::VectorXd &u_prev, double k, const Eigen::VectorXd &f0,
                        const Eigen::VectorXd &g0) {
  const Eigen::VectorXd rhs = M * u_prev + f0 + k * g0;
  return linear_solve(dg_system_matrix(M, A, 0, k), rhs);
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> step_d1(
    const SparseMatrix &M, const SparseMatrix &A, const Eigen::VectorXd &u_prev, double k,
    const Eigen::VectorXd &f0, const Eigen::VectorXd &f1, const Eigen::VectorXd &g0,
    const Eigen::VectorXd &g1) {
  const Eigen::Index n = M.rows();
  Eigen::VectorXd rhs(2 * n);
  const Eigen::VectorXd mu = M * u_prev;
  rhs.head(n) = mu + f0 + k * g0;
  rhs.tail(n) = -mu + f1 + (k / 3.0) * g1;
  const Eigen::VectorXd x = linear_solve(dg_system_matrix(M, A, 1, k), rhs);
  return {x.head(n), x.tail(n)};
}

LocalSolver::LocalSolver(std::shared_ptr<const SubdomainOperators> ops, Coupling coupling)
    : ops_(std::move(ops)), coupling_(coupling) {}

std::vector<Eigen::MatrixXd> LocalSolver::loads(const TimePartition &partition) const {
  const int d = ops_->degree;
  const Eigen::Index n = ops_->ndofs();
  const auto nt = static_cast<Eigen::Index>(partition.intervals());
  if (ops_->f.is_constant() && ops_->f(0.0) == 0.0) return {};
  std::vector<Eigen::MatrixXd> out(static_cast<std::size_t>(d) + 1, Eigen::MatrixXd::Zero(n, nt));
  for (Eigen::Index i = 0; i < nt; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    const auto f = assemble_load(ops_->space, ops_->f, partition[idx], partition.length(idx), d);
    for (int j = 0; j <= d; ++j) out[j].col(i) = f[j];
  }
  return out;
}

const LinearSolver &LocalSolver::solver_for(double k) {
  for (const auto &[key, s] : cache_) {
    if (std::abs(key - k) <= 1e-12 * k) return *s;
  }
  const SubdomainOperators &o = *ops_;
  const int d = o.degree;
  SparseMatrix system;
  if (coupling_ == Coupling::conforming) {
    system = dg_system_matrix(o.M, o.A, d, k);
  } else {
    // Unknown layout: [U_0 .. U_d | Q^1_0 .. Q^1_d | Q^2_0 .. ].
    const IntervalBasis basis = build_interval_basis(d, k);
    const Eigen::Index n = o.ndofs();
    const Eigen::Index nb = d + 1;
    Eigen::Index total = nb * n;
    std::vector<Eigen::Index> offset;
    for (const auto &io : o.interfaces) {
      offset.push_back(total);
      total += nb * static_cast<Eigen::Index>(io.dofs.size());
    }
    Triplets t;
    for (int j = 0; j <= d; ++j) {
      for (int m = 0; m <= d; ++m) append(t, o.mass_volume, j * n, m * n, basis.A[m][j]);
      append(t, o.A_mortar, j * n, j * n, basis.norm2[j]);
    }
    for (std::size_t g = 0; g < o.interfaces.size(); ++g) {
      const InterfaceOperators &io = o.interfaces[g];
      const auto ng = static_cast<Eigen::Index>(io.dofs.size());
      const SparseMatrix et = restriction(io.dofs, n);
      const SparseMatrix e_mg = SparseMatrix(et.transpose()) * io.M_gamma;  // E M_gamma
      const SparseMatrix r = (io.static_block() - 0.5 * io.M_bn) * et;
      const SparseMatrix mg_et = io.M_gamma * et;
      for (int j = 0; j <= d; ++j) {
        const Eigen::Index qrow = offset[g] + j * ng;
        // volume row: - ||L_j||^2 E M_gamma Q_j
        append(t, e_mg, j * n, qrow, -basis.norm2[j]);
        // interface row
        append(t, io.M_gamma, qrow, qrow, basis.norm2[j]);
        append(t, r, qrow, j * n, basis.norm2[j]);
        for (int m = 0; m <= d; ++m) append(t, mg_et, qrow, m * n, io.q * basis.A[m][j]);
      }
    }
    system.resize(total, total);
    system.setFromTriplets(t.begin(), t.end());
  }
  cache_.emplace_back(k, std::make_unique<LinearSolver>(system));
  return *cache_.back().second;
}

DGTrajectory LocalSolver::solve_window(const TraceMap &traces, const TimePartition &partition,
                                       const Eigen::VectorXd &u_init,
                                       const std::vector<Eigen::MatrixXd> *loads) {
  if (coupling_ != Coupling::conforming) {
    return solve_window_mortar(traces, partition, u_init, loads).first;
  }
  const SubdomainOperators &o = *ops_;
  const int d = o.degree;
  const Eigen::Index n = o.ndofs();
  std::vector<Eigen::MatrixXd> own;
  if (!loads) {
    own = this->loads(partition);
    loads = &own;
  }
  for (const auto &[id, tr] : traces) {
    if (!(tr.partition == partition) || tr.degree != d) {
      throw ValidationError("interface data does not live on the subdomain time grid");
    }
  }
  DGTrajectory traj(partition, d, u_init);
  Eigen::VectorXd u_prev = u_init;
  Eigen::VectorXd rhs((d + 1) * n);
  for (std::size_t i = 0; i < partition.intervals(); ++i) {
    const double k = partition.length(i);
    const IntervalBasis basis = build_interval_basis(d, k);
    const Eigen::VectorXd mu = o.M * u_prev;
    const auto col = static_cast<Eigen::Index>(i);
    for (int j = 0; j <= d; ++j) {
      auto seg = rhs.segment(j * n, n);
      seg = sign(j) * mu;
      if (!loads->empty()) seg += (*loads)[j].col(col);
      for (const auto &io : o.interfaces) {
        auto it = traces.find(io.neighbour);
        if (it == traces.end()) continue;
        const auto &g = it->second.modes[j];
        for (std::size_t a = 0; a < io.dofs.size(); ++a) {
          seg[io.dofs[a]] += basis.norm2[j] * g(static_cast<Eigen::Index>(a), col);
        }
      }
    }
    const Eigen::VectorXd x = solver_for(k).solve(rhs);
    u_prev.setZero();
    for (int j = 0; j <= d; ++j) {
      traj.modes[j].col(col) = x.segment(j * n, n);
      u_prev += x.segment(j * n, n);
    }
  }
  return traj;
}

std::pair<DGTrajectory, FluxMap> LocalSolver::solve_window_mortar(
    const TraceMap &traces, const TimePartition &partition, const Eigen::VectorXd &u_init,
    const std::vector<Eigen::MatrixXd> *loads) {
  if (coupling_ != Coupling::mortar) {
    throw ValidationError("local solver was not built for the mortar formulation");
  }
  const SubdomainOperators &o = *ops_;
  const int d = o.degree;
  const Eigen::Index n = o.ndofs();
  const Eigen::Index nb = d + 1;
  std::vector<Eigen::MatrixXd> own;
  if (!loads) {
    own = this->loads(partition);
    loads = &own;
  }
  for (const auto &[id, tr] : traces) {
    if (!(tr.partition == partition) || tr.degree != d) {
      throw ValidationError("interface data does not live on the subdomain time grid");
    }
  }
  Eigen::Index total = nb * n;
  std::vector<Eigen::Index> offset;
  FluxMap flux;
  for (const auto &io : o.interfaces) {
    offset.push_back(total);
    total += nb * static_cast<Eigen::Index>(io.dofs.size());
    flux.emplace(io.neighbour,
                 MortarFlux(partition, d, static_cast<Eigen::Index>(io.dofs.size())));
  }

  DGTrajectory traj(partition, d, u_init);
  Eigen::VectorXd u_prev = u_init;
  Eigen::VectorXd rhs(total);
  for (std::size_t i = 0; i < partition.intervals(); ++i) {
    const double k = partition.length(i);
    const IntervalBasis basis = build_interval_basis(d, k);
    const Eigen::VectorXd mu = o.mass_volume * u_prev;
    const auto col = static_cast<Eigen::Index>(i);
    for (int j = 0; j <= d; ++j) {
      rhs.segment(j * n, n) = sign(j) * mu;
      if (!loads->empty()) rhs.segment(j * n, n) += (*loads)[j].col(col);
    }
    for (std::size_t g = 0; g < o.interfaces.size(); ++g) {
      const InterfaceOperators &io = o.interfaces[g];
      const auto ng = static_cast<Eigen::Index>(io.dofs.size());
      Eigen::VectorXd trace(ng);
      for (Eigen::Index a = 0; a < ng; ++a) trace[a] = u_prev[io.dofs[static_cast<std::size_t>(a)]];
      const Eigen::VectorXd mt = io.M_gamma * trace;
      auto it = traces.find(io.neighbour);
      for (int j = 0; j <= d; ++j) {
        auto seg = rhs.segment(offset[g] + j * ng, ng);
        seg = io.q * sign(j) * mt;
        if (it != traces.end()) seg += basis.norm2[j] * it->second.modes[j].col(col);
      }
    }
    const Eigen::VectorXd x = solver_for(k).solve(rhs);
    u_prev.setZero();
    for (int j = 0; j <= d; ++j) {
      traj.modes[j].col(col) = x.segment(j * n, n);
      u_prev += x.segment(j * n, n);
    }
    for (std::size_t g = 0; g < o.interfaces.size(); ++g) {
      const InterfaceOperators &io = o.interfaces[g];
      const auto ng = static_cast<Eigen::Index>(io.dofs.size());
      auto &q = flux.at(io.neighbour);
      for (int j = 0; j <= d; ++j) q.modes[j].col(col) = x.segment(offset[g] + j * ng, ng);
    }
  }
  return {std::move(traj), std::move(flux)};
}

}  // namespace oswr

#include "oswr/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <string>

#include "oswr/validate.hpp"

namespace oswr {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

bool close(double a, double b, double scale) {
  return std::abs(a - b) <= 1e-10 * std::max(1.0, std::abs(scale));
}

long long lcm_all(const std::vector<long long> &v) {
  long long l = 1;
  for (long long x : v) l = std::lcm(l, x);
  return l;
}

/// Smallest multiple of lcm(counts) that is >= factor * max(counts).
long long common_count(const std::vector<long long> &counts, int factor) {
  const long long l = lcm_all(counts);
  const long long target = factor * *std::max_element(counts.begin(), counts.end());
  return ((target + l - 1) / l) * l;
}

long long as_count(double v, const char *what) {
  const double r = std::round(v);
  if (r < 1.0 || std::abs(v - r) > 1e-8 * std::max(1.0, r)) {
    throw ValidationError(std::string(what) + " grids cannot be nested in a common grid");
  }
  return static_cast<long long>(r);
}

std::vector<double> reference_axis(const ExperimentConfig &cfg, int axis, int factor) {
  std::vector<double> cuts;
  for (const auto &s : cfg.subdomains) {
    cuts.push_back(axis == 0 ? s.box.x0 : s.box.y0);
    cuts.push_back(axis == 0 ? s.box.x1 : s.box.y1);
  }
  std::sort(cuts.begin(), cuts.end());
  const double scale = cuts.back() - cuts.front();
  cuts.erase(std::unique(cuts.begin(), cuts.end(),
                         [&](double a, double b) { return close(a, b, scale); }),
             cuts.end());
  std::vector<double> lines{cuts.front()};
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double a = cuts[k], b = cuts[k + 1];
    std::vector<long long> counts;
    for (const auto &s : cfg.subdomains) {
      const double lo = axis == 0 ? s.box.x0 : s.box.y0;
      const double hi = axis == 0 ? s.box.x1 : s.box.y1;
      if (lo > a + 1e-12 * scale || hi < b - 1e-12 * scale) continue;
      const int n = axis == 0 ? s.nx : s.ny;
      counts.push_back(as_count((b - a) / ((hi - lo) / n), "space"));
    }
    const long long n = common_count(counts, factor);
    for (long long i = 1; i <= n; ++i) {
      lines.push_back(i == n ? b : a + (b - a) * static_cast<double>(i) / static_cast<double>(n));
    }
  }
  return lines;
}

/// Value of the DG field at t, taking the left limit when t sits on a
/// breakpoint up to rounding.
Eigen::VectorXd left_value(std::span<const DGTrajectory> windows, double t) {
  const double T = windows.back().partition.end();
  const double t0 = windows.front().partition.start();
  const double teff = t - 1e-11 * (T - t0);
  if (teff <= t0) return windows.front().initial;
  for (const auto &w : windows) {
    if (teff <= w.partition.end()) return w.value_in(w.partition.locate(teff), t);
  }
  return windows.back().final_value();
}

/// Sample times for L_inf: t_0 plus the Radau nodes of every interval.
std::vector<double> radau_samples(const TimePartition &time, int d) {
  const RadauRule r = gauss_radau(d);
  std::vector<double> t{time.start()};
  for (std::size_t n = 0; n < time.intervals(); ++n) {
    for (double tau : r.nodes) t.push_back(tau == 1.0 ? time[n + 1] : time[n] + tau * time.length(n));
  }
  return t;
}

struct RegionNorms {
  SparseMatrix mass;
  SparseMatrix h1;  // mass + stiffness
};

/// Shared norm computation: error(s, t) returns the error vector of
/// subdomain s at time t.
template <class ErrorAt>
ErrorReport compute_norms(const std::vector<RegionNorms> &norms, const TimePartition &time, int d,
                          ErrorAt &&error) {
  ErrorReport rep;
  const auto samples = radau_samples(time, d);
  const GaussRule &g = gauss_legendre(3);
  for (std::size_t s = 0; s < norms.size(); ++s) {
    const SparseMatrix &m = norms[s].mass;
    auto sq = [&](const Eigen::VectorXd &e) { return std::max(0.0, e.dot(m * e)); };
    SubdomainErrors err;
    double inf = 0.0;
    for (double t : samples) inf = std::max(inf, sq(error(s, t)));
    err.e_inf = std::sqrt(inf);
    double l2 = 0.0;
    for (std::size_t n = 0; n < time.intervals(); ++n) {
      for (std::size_t q = 0; q < g.nodes.size(); ++q) {
        const double t = time.midpoint(n) + 0.5 * time.length(n) * g.nodes[q];
        l2 += 0.5 * time.length(n) * g.weights[q] * sq(error(s, t));
      }
    }
    err.e_l2 = std::sqrt(l2);
    const Eigen::VectorXd eT = error(s, time.end());
    err.e_T_l2 = std::sqrt(sq(eT));
    err.e_T_h1 = std::sqrt(std::max(0.0, eT.dot(norms[s].h1 * eT)));
    rep.subdomains.push_back(err);
  }
  return rep;
}

/// P1 interpolation from a rectilinear mesh onto the nodes of `fine` lying
/// in `box`; rows of other nodes are empty.
SparseMatrix interpolation_matrix(const Mesh &coarse, const Mesh &fine, const Box &box) {
  Triplets t;
  const double tol = 1e-12 * std::max(1.0, box.x1 - box.x0);
  for (std::size_t v = 0; v < fine.num_nodes(); ++v) {
    const double x = fine.nodes[v][0], y = fine.nodes[v][1];
    if (!box.contains(x, y, tol)) continue;
    const auto &xs = coarse.xs;
    std::size_t i = static_cast<std::size_t>(
        std::upper_bound(xs.begin(), xs.end(), x) - xs.begin());
    i = std::clamp<std::size_t>(i, 1, xs.size() - 1) - 1;
    const double sx = std::clamp((x - xs[i]) / (xs[i + 1] - xs[i]), 0.0, 1.0);
    const int row = static_cast<int>(v);
    if (coarse.dim == 1) {
      t.emplace_back(row, coarse.node_index(i, 0), 1.0 - sx);
      t.emplace_back(row, coarse.node_index(i + 1, 0), sx);
      continue;
    }
    const auto &ys = coarse.ys;
    std::size_t j = static_cast<std::size_t>(
        std::upper_bound(ys.begin(), ys.end(), y) - ys.begin());
    j = std::clamp<std::size_t>(j, 1, ys.size() - 1) - 1;
    const double sy = std::clamp((y - ys[j]) / (ys[j + 1] - ys[j]), 0.0, 1.0);
    const int a = coarse.node_index(i, j), b = coarse.node_index(i + 1, j);
    const int c = coarse.node_index(i + 1, j + 1), d = coarse.node_index(i, j + 1);
    if (sy <= sx) {  // lower triangle (a, b, c)
      t.emplace_back(row, a, 1.0 - sx);
      t.emplace_back(row, b, sx - sy);
      t.emplace_back(row, c, sy);
    } else {  // upper triangle (a, c, d)
      t.emplace_back(row, a, 1.0 - sy);
      t.emplace_back(row, c, sx);
      t.emplace_back(row, d, sy - sx);
    }
  }
  SparseMatrix p(static_cast<Eigen::Index>(fine.num_nodes()),
                 static_cast<Eigen::Index>(coarse.num_nodes()));
  p.setFromTriplets(t.begin(), t.end());
  return p;
}

void require_nested(const std::vector<double> &coarse, const std::vector<double> &fine,
                    const char *what) {
  const double scale = fine.back() - fine.front();
  for (double c : coarse) {
    auto it = std::lower_bound(fine.begin(), fine.end(), c - 1e-10 * scale);
    if (it == fine.end() || !close(*it, c, scale)) {
      throw ValidationError(std::string(what) + " grid is not nested in the reference grid");
    }
  }
}

std::vector<int> elements_in(const Mesh &mesh, const Box &box) {
  std::vector<int> out;
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    const auto c = mesh.centroid(e);
    if (box.contains(c[0], c[1], 0.0)) out.push_back(static_cast<int>(e));
  }
  return out;
}

RegionNorms region_norms(const FemSpace &space, const std::vector<int> &elements) {
  RegionNorms r;
  r.mass = assemble_mass(space, Expression::constant(1.0), {}, &elements);
  r.h1 = r.mass + assemble_stiffness(space, &elements);
  return r;
}

}  // namespace

ReferenceGrid reference_grid(const ExperimentConfig &cfg, int space_factor, int time_factor) {
  ReferenceGrid g;
  g.xs = reference_axis(cfg, 0, space_factor);
  if (cfg.domain.dim == 2) g.ys = reference_axis(cfg, 1, space_factor);
  std::vector<long long> counts;
  for (const auto &s : cfg.subdomains) counts.push_back(static_cast<long long>(s.nt) * cfg.windows);
  const long long n = common_count(counts, time_factor);
  g.time = TimePartition::uniform(0.0, cfg.T, static_cast<int>(n));
  return g;
}

MonodomainSolution solve_monodomain(const ExperimentConfig &cfg, const ReferenceGrid &grid) {
  MonodomainSolution out;
  out.space = make_space(build_rectilinear_mesh(grid.xs, grid.ys));
  const Mesh &mesh = out.space.mesh;
  const auto n = static_cast<Eigen::Index>(out.space.ndofs());

  out.region.assign(mesh.num_elements(), -1);
  std::vector<std::vector<int>> elements(cfg.subdomains.size());
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    const auto c = mesh.centroid(e);
    for (std::size_t s = 0; s < cfg.subdomains.size(); ++s) {
      if (cfg.subdomains[s].box.contains(c[0], c[1], 0.0)) {
        out.region[e] = static_cast<int>(s);
        elements[s].push_back(static_cast<int>(e));
        break;
      }
    }
    if (out.region[e] < 0) throw ValidationError("reference element outside every subdomain");
  }

  SparseMatrix mass(n, n), a(n, n);
  for (std::size_t s = 0; s < cfg.subdomains.size(); ++s) {
    const Coefficients k = Coefficients::of(cfg.subdomains[s]);
    mass += assemble_mass(out.space, k.omega, {}, &elements[s]);
    a += assemble_atilde(out.space, k, &elements[s]);
    a += assemble_exterior_closure(out.space, k, cfg.exterior_p, &elements[s]);
  }

  // Interface jump of the skew-symmetric advection form:
  // -1/2 int (b_i.n_i + b_j.n_j) u v.
  for (const auto &[ia, ib] : adjacent_pairs(cfg)) {
    const SubdomainSpec &sa = cfg.subdomain(ia);
    const SubdomainSpec &sb = cfg.subdomain(ib);
    const Box &A = sa.box, &B = sb.box;
    int tangent = -1;
    double position = 0.0, lo = 0.0, hi = 0.0;
    std::array<double, 2> na{0.0, 0.0};
    const double scale = std::max(1.0, A.x1 - A.x0);
    if (close(A.x1, B.x0, scale) || close(B.x1, A.x0, scale)) {
      const bool right = close(A.x1, B.x0, scale);
      position = right ? A.x1 : A.x0;
      na = {right ? 1.0 : -1.0, 0.0};
      tangent = cfg.domain.dim == 2 ? 1 : -1;
      lo = std::max(A.y0, B.y0);
      hi = std::min(A.y1, B.y1);
    }
    if (cfg.domain.dim == 2 && (tangent < 0 || hi <= lo)) {
      const bool top = close(A.y1, B.y0, scale);
      position = top ? A.y1 : A.y0;
      na = {0.0, top ? 1.0 : -1.0};
      tangent = 0;
      lo = std::max(A.x0, B.x0);
      hi = std::min(A.x1, B.x1);
    }
    const Coefficients ka = Coefficients::of(sa), kb = Coefficients::of(sb);
    const bool two_d = cfg.domain.dim == 2;
    auto weight = [&](double x, double y) {
      const double ja = ka.bx(x, y) * na[0] + (two_d ? ka.by(x, y) * na[1] : 0.0);
      const double jb = kb.bx(x, y) * na[0] + (two_d ? kb.by(x, y) * na[1] : 0.0);
      return -0.5 * (ja - jb);
    };
    a += assemble_segment_mass(mesh, tangent, position, lo, hi, weight);
  }

  SubdomainSpec whole = cfg.subdomains.front();
  whole.id = 0;
  auto ops = std::make_shared<SubdomainOperators>();
  ops->id = 0;
  ops->degree = whole.degree;
  ops->space = out.space;
  ops->f = cfg.f;
  ops->mass_volume = mass;
  ops->a_volume = a;
  ops->M = mass;
  ops->A = a;
  ops->A_mortar = a;
  LocalSolver solver(ops, Coupling::conforming);
  const Eigen::VectorXd u0 = interpolate(out.space, cfg.u0, 0.0);
  out.trajectory = solver.solve_window({}, grid.time, u0);
  return out;
}

ErrorReport error_norms(const MultidomainProblem &problem, const MultidomainSolution &solution,
                        const MonodomainSolution &reference) {
  const ExperimentConfig &cfg = problem.config();
  const Mesh &fine = reference.space.mesh;
  const TimePartition &time = reference.trajectory.partition;
  std::vector<RegionNorms> norms;
  std::vector<SparseMatrix> interp;
  for (std::size_t s = 0; s < problem.size(); ++s) {
    const Mesh &coarse = problem.operators(s).space.mesh;
    require_nested(coarse.xs, fine.xs, "space");
    if (coarse.dim == 2) require_nested(coarse.ys, fine.ys, "space");
    for (const auto &w : solution.windows[s]) require_nested(w.partition.breakpoints(), time.breakpoints(), "time");
    const Box &box = cfg.subdomains[s].box;
    norms.push_back(region_norms(reference.space, elements_in(fine, box)));
    interp.push_back(interpolation_matrix(coarse, fine, box));
  }
  const std::span<const DGTrajectory> ref_windows(&reference.trajectory, 1);
  return compute_norms(norms, time, reference.trajectory.degree, [&](std::size_t s, double t) {
    const Eigen::VectorXd e = interp[s] * left_value(solution.windows[s], t) - left_value(ref_windows, t);
    return e;
  });
}

ErrorReport solution_difference(const MultidomainProblem &problem, const MultidomainSolution &a,
                                const MultidomainSolution &b, const TimePartition &time) {
  std::vector<RegionNorms> norms;
  for (std::size_t s = 0; s < problem.size(); ++s) {
    const FemSpace &space = problem.operators(s).space;
    for (const auto *sol : {&a, &b}) {
      for (const auto &w : sol->windows[s]) require_nested(w.partition.breakpoints(), time.breakpoints(), "time");
    }
    norms.push_back(region_norms(space, elements_in(space.mesh, problem.config().subdomains[s].box)));
  }
  return compute_norms(norms, time, problem.degree(), [&](std::size_t s, double t) {
    const Eigen::VectorXd e = left_value(a.windows[s], t) - left_value(b.windows[s], t);
    return e;
  });
}

double fit_slope(const std::vector<double> &errors) {
  const auto n = static_cast<double>(errors.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < errors.size(); ++i) {
    const double x = static_cast<double>(i);
    const double y = std::log2(errors[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double den = n * sxx - sx * sx;
  if (errors.size() < 2 || den == 0.0) return std::nan("");
  return -(n * sxy - sx * sy) / den;
}

ExperimentConfig refine(const ExperimentConfig &cfg, StudyAxis axis, int level, int ratio) {
  ExperimentConfig out = cfg;
  int f = 1;
  for (int l = 0; l < level; ++l) f *= ratio;
  for (auto &s : out.subdomains) {
    if (axis != StudyAxis::space) s.nt *= f;
    if (axis != StudyAxis::time) {
      s.nx *= f;
      if (cfg.domain.dim == 2) s.ny *= f;
    }
  }
  return out;
}

StudyTable convergence_study(const ExperimentConfig &cfg, const StudyOptions &options) {
  if (options.levels < 3) throw ValidationError("a convergence study needs at least 3 levels");
  if (options.refine_ratio < 2) throw ValidationError("refinement ratio must be at least 2");
  require_valid(validate_problem(cfg));

  const ExperimentConfig finest = refine(cfg, options.axis, options.levels - 1, options.refine_ratio);
  const int sf = options.axis == StudyAxis::time ? 1 : options.reference_factor;
  const int tf = options.axis == StudyAxis::space ? 1 : options.reference_factor;
  const MonodomainSolution reference = solve_monodomain(finest, reference_grid(finest, sf, tf));

  StudyTable table;
  for (const auto &s : cfg.subdomains) table.ids.push_back(s.id);
  for (int level = 0; level < options.levels; ++level) {
    ExperimentConfig lc = refine(cfg, options.axis, level, options.refine_ratio);
    lc.tolerance = options.tolerance;
    lc.max_iterations = options.max_iterations;
    MultidomainProblem problem(lc, options.coupling);
    IterateOptions it;
    it.tolerance = options.tolerance;
    it.max_iterations = options.max_iterations;
    const MultidomainSolution sol = run_windows(problem, it);

    StudyRow row;
    row.level = level;
    for (std::size_t s = 0; s < problem.size(); ++s) {
      row.h.push_back(problem.operators(s).space.mesh.max_spacing());
      row.k.push_back(lc.T / (lc.windows * lc.subdomains[s].nt));
    }
    row.errors = error_norms(problem, sol, reference).subdomains;
    row.converged = true;
    for (const auto &h : sol.histories) {
      row.iterations = std::max(row.iterations, h.iterations());
      row.converged = row.converged && h.converged;
    }
    table.rows.push_back(std::move(row));
  }

  for (std::size_t s = 0; s < table.ids.size(); ++s) {
    std::vector<double> inf, l2, tl2, th1;
    for (const auto &r : table.rows) {
      inf.push_back(r.errors[s].e_inf);
      l2.push_back(r.errors[s].e_l2);
      tl2.push_back(r.errors[s].e_T_l2);
      th1.push_back(r.errors[s].e_T_h1);
    }
    table.slopes.push_back({fit_slope(inf), fit_slope(l2), fit_slope(tl2), fit_slope(th1)});
  }
  return table;
}

TraceMap random_traces(const SubdomainOperators &ops, const TimePartition &partition,
                       std::mt19937_64 &rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  TraceMap out;
  for (const auto &io : ops.interfaces) {
    InterfaceTrace g(partition, ops.degree, static_cast<Eigen::Index>(io.dofs.size()));
    for (auto &m : g.modes) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        for (Eigen::Index r = 0; r < m.rows(); ++r) m(r, c) = dist(rng);
      }
    }
    out.emplace(io.neighbour, std::move(g));
  }
  return out;
}

std::vector<SweepRow> sweep_parameters(const ExperimentConfig &cfg, const SweepOptions &options) {
  if (options.p_values.empty() || options.q_values.empty()) {
    throw ValidationError("parameter sweep needs at least one p and one q value");
  }
  std::vector<SweepRow> rows;
  for (double q : options.q_values) {
    for (double p : options.p_values) {
      ExperimentConfig c = cfg;
      for (auto &t : c.transmissions) {
        t.p = p;
        t.q = q;
      }
      if (options.mode == SweepMode::error) {
        c.f = Expression();
        c.u0 = Expression();
      }
      MultidomainProblem problem(c, options.coupling);
      std::vector<Eigen::VectorXd> u;
      std::vector<TraceMap> init;
      std::mt19937_64 rng(options.seed);
      for (std::size_t s = 0; s < problem.size(); ++s) {
        u.push_back(problem.initial_value(s));
        const TimePartition part = problem.window_partition(s, 0);
        init.push_back(options.mode == SweepMode::error
                           ? random_traces(problem.operators(s), part, rng)
                           : initial_guess(c.initial_guess, problem.operators(s), part, u.back()));
      }
      IterateOptions it;
      it.max_iterations = options.max_iterations;
      it.tolerance = options.target;
      SweepRow row;
      row.p = p;
      row.q = q;
      try {
        const IterateResult r = iterate(problem, 0, u, init, it);
        row.converged = r.history.converged;
        row.iterations = r.history.iterations();
      } catch (const IterationError &e) {
        row.converged = false;
        row.iterations = e.history().iterations();
      }
      rows.push_back(row);
    }
  }
  SweepRow *best = nullptr;
  for (auto &r : rows) {
    if (r.converged && (!best || r.iterations < best->iterations)) best = &r;
  }
  if (best) best->best = true;
  return rows;
}

}  // namespace oswr

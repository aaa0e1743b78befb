#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <memory>
#include <random>

#include "oswr/analysis.hpp"
#include "oswr/assembly.hpp"
#include "test_support.hpp"

using namespace oswr;

namespace {

ExperimentConfig heat_one_window() {
  ExperimentConfig cfg = load_config(test::config_path("heat1d.cfg"));
  cfg.windows = 1;
  return cfg;
}

MultidomainSolution random_solution(const MultidomainProblem &problem, std::mt19937_64 &rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  MultidomainSolution sol;
  for (std::size_t s = 0; s < problem.size(); ++s) {
    Eigen::VectorXd init(problem.operators(s).ndofs());
    for (Eigen::Index i = 0; i < init.size(); ++i) init(i) = u(rng);
    DGTrajectory t(problem.window_partition(s, 0), problem.degree(), init);
    for (auto &m : t.modes) {
      for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = u(rng);
    }
    sol.windows.push_back({t});
  }
  return sol;
}

MultidomainSolution constant_solution(const MultidomainProblem &problem,
                                      const std::vector<Expression> &values) {
  MultidomainSolution sol;
  for (std::size_t s = 0; s < problem.size(); ++s) {
    const Eigen::VectorXd v = interpolate(problem.operators(s).space, values[s]);
    DGTrajectory t(problem.window_partition(s, 0), problem.degree(), v);
    for (Eigen::Index n = 0; n < t.modes[0].cols(); ++n) t.modes[0].col(n) = v;
    sol.windows.push_back({t});
  }
  return sol;
}

}  // namespace

TEST_CASE("slope fit") {
  for (double alpha : {0.5, 1.0, 2.0, 2.97}) {
    std::vector<double> e;
    for (int l = 0; l < 5; ++l) e.push_back(3.7 * std::pow(2.0, -alpha * l));
    CHECK(fit_slope(e) == doctest::Approx(alpha).epsilon(1e-10));
  }
  CHECK(fit_slope({1.0, 0.5, 0.3, 0.1}) > 0.0);
}

TEST_CASE("difference norms") {
  const ExperimentConfig cfg = heat_one_window();
  const MultidomainProblem problem(cfg);
  const TimePartition time = TimePartition::uniform(0.0, cfg.T, 40);
  std::mt19937_64 rng(6);
  const MultidomainSolution a = random_solution(problem, rng);

  SUBCASE("self difference is zero") {
    for (const auto &e : solution_difference(problem, a, a, time).subdomains) {
      CHECK(e.e_inf == 0.0);
      CHECK(e.e_l2 == 0.0);
      CHECK(e.e_T_l2 == 0.0);
      CHECK(e.e_T_h1 == 0.0);
    }
  }
  SUBCASE("constant offset") {
    const double delta = 0.125;
    MultidomainSolution b = a;
    for (auto &w : b.windows) {
      w[0].initial.array() += delta;
      w[0].modes[0].array() += delta;
    }
    const ErrorReport r = solution_difference(problem, a, b, time);
    for (std::size_t s = 0; s < 2; ++s) {
      const double measure = cfg.subdomains[s].box.measure();
      const SubdomainErrors &e = r.subdomains[s];
      CHECK(e.e_T_l2 == doctest::Approx(delta * std::sqrt(measure)).epsilon(1e-13));
      CHECK(e.e_T_h1 == doctest::Approx(delta * std::sqrt(measure)).epsilon(1e-13));
      CHECK(e.e_inf == doctest::Approx(delta * std::sqrt(measure)).epsilon(1e-13));
      CHECK(e.e_l2 == doctest::Approx(delta * std::sqrt(measure * cfg.T)).epsilon(1e-13));
    }
  }
  SUBCASE("closed-form fields") {
    const MultidomainSolution zero = constant_solution(problem, {Expression(), Expression()});
    const MultidomainSolution lin =
        constant_solution(problem, {Expression::parse("2*x+1"), Expression::parse("2*x+1")});
    const ErrorReport r = solution_difference(problem, zero, lin, time);
    // int (2x+1)^2 = ((2b+1)^3 - (2a+1)^3) / 6, int 4 = 4 (b - a)
    for (std::size_t s = 0; s < 2; ++s) {
      const double a0 = cfg.subdomains[s].box.x0, a1 = cfg.subdomains[s].box.x1;
      const double l2 = (std::pow(2 * a1 + 1, 3) - std::pow(2 * a0 + 1, 3)) / 6.0;
      CHECK(r.subdomains[s].e_T_l2 == doctest::Approx(std::sqrt(l2)).epsilon(1e-13));
      CHECK(r.subdomains[s].e_T_h1 == doctest::Approx(std::sqrt(l2 + 4 * (a1 - a0))).epsilon(1e-13));
    }
  }
  SUBCASE("triangle inequality") {
    for (int trial = 0; trial < 20; ++trial) {
      const MultidomainSolution u = random_solution(problem, rng);
      const MultidomainSolution v = random_solution(problem, rng);
      const MultidomainSolution w = random_solution(problem, rng);
      const ErrorReport uw = solution_difference(problem, u, w, time);
      const ErrorReport uv = solution_difference(problem, u, v, time);
      const ErrorReport vw = solution_difference(problem, v, w, time);
      for (std::size_t s = 0; s < 2; ++s) {
        const auto &x = uw.subdomains[s], &y = uv.subdomains[s], &z = vw.subdomains[s];
        CHECK(x.e_inf <= y.e_inf + z.e_inf + 1e-12);
        CHECK(x.e_l2 <= y.e_l2 + z.e_l2 + 1e-12);
        CHECK(x.e_T_l2 <= y.e_T_l2 + z.e_T_l2 + 1e-12);
        CHECK(x.e_T_h1 <= y.e_T_h1 + z.e_T_h1 + 1e-12);
      }
    }
  }
}

TEST_CASE("reference grids") {
  const ExperimentConfig cfg = load_config(test::config_path("experiment1.cfg"));
  const ReferenceGrid g = reference_grid(cfg, 1, 4);
  CHECK(g.time.intervals() % 32 == 0);
  CHECK(g.time.intervals() % 24 == 0);
  CHECK(g.time.intervals() >= 128);
  CHECK(g.xs.size() == 17);
  CHECK(g.ys.size() == 33);
  const ReferenceGrid g2 = reference_grid(cfg, 2, 1);
  CHECK(g2.xs.size() == 33);
  CHECK(g2.time.intervals() == 96);
}

TEST_CASE("refinement levels") {
  const ExperimentConfig cfg = load_config(test::config_path("experiment1.cfg"));
  const ExperimentConfig t2 = refine(cfg, StudyAxis::time, 2, 2);
  CHECK(t2.subdomains[0].nt == 128);
  CHECK(t2.subdomains[1].nt == 96);
  CHECK(t2.subdomains[0].nx == 8);
  const ExperimentConfig st = refine(cfg, StudyAxis::spacetime, 1, 2);
  CHECK(st.subdomains[1].nt == 48);
  CHECK(st.subdomains[1].ny == 64);
  const ExperimentConfig sp = refine(cfg, StudyAxis::space, 1, 2);
  CHECK(sp.subdomains[1].nt == 24);
  CHECK(sp.subdomains[1].nx == 16);
}

TEST_CASE("monodomain reference") {
  SUBCASE("identical coefficients reduce to one subdomain") {
    ExperimentConfig cfg = heat_one_window();
    for (auto &s : cfg.subdomains) {
      s.nu = Expression::constant(0.05);
      s.c = Expression::constant(0.3);
      s.bx = Expression::parse("0.5*x");
    }
    cfg.subdomains[0].nx = 8;
    cfg.subdomains[1].nx = 12;
    cfg.subdomains[0].nt = 10;
    cfg.subdomains[1].nt = 10;
    const ReferenceGrid grid = reference_grid(cfg, 1, 1);
    const MonodomainSolution mono = solve_monodomain(cfg, grid);
    SubdomainSpec whole = cfg.subdomains[0];
    whole.box = cfg.domain;
    whole.nx = 20;
    auto ops = std::make_shared<const SubdomainOperators>(assemble_single(cfg, whole));
    LocalSolver solver(ops, Coupling::conforming);
    const auto loads = solver.loads(grid.time);
    const DGTrajectory u =
        solver.solve_window({}, grid.time, interpolate(ops->space, cfg.u0), &loads);
    CHECK((u.final_value() - mono.trajectory.final_value()).cwiseAbs().maxCoeff() < 1e-13);
    CHECK((u.modes[1] - mono.trajectory.modes[1]).cwiseAbs().maxCoeff() < 1e-13);
  }
  SUBCASE("linear-in-time solution is exact") {
    ExperimentConfig cfg = heat_one_window();
    cfg.u0 = Expression();
    cfg.f = Expression::parse("1+t");
    cfg.exterior_p = 0.0;
    for (auto &s : cfg.subdomains) {
      s.bx = Expression();
      s.c = Expression::constant(1.0);
    }
    const MonodomainSolution mono = solve_monodomain(cfg, reference_grid(cfg, 1, 1));
    CHECK((mono.trajectory.final_value().array() - cfg.T).abs().maxCoeff() < 1e-13);
    CHECK((mono.trajectory.evaluate(0.13).array() - 0.13).abs().maxCoeff() < 1e-13);
  }
  SUBCASE("non-nested reference is rejected") {
    const ExperimentConfig cfg = heat_one_window();
    ExperimentConfig other = cfg;
    other.subdomains[0].nx = 7;
    const MonodomainSolution mono = solve_monodomain(other, reference_grid(other, 1, 1));
    MultidomainProblem problem(cfg);
    IterateOptions opt;
    opt.max_iterations = 2;
    const MultidomainSolution sol = run_windows(problem, opt);
    CHECK_THROWS_AS(error_norms(problem, sol, mono), ValidationError);
  }
}

TEST_CASE("errors against the reference shrink with the time step") {
  ExperimentConfig cfg = heat_one_window();
  StudyOptions opt;
  opt.axis = StudyAxis::time;
  opt.levels = 3;
  const StudyTable t = convergence_study(cfg, opt);
  REQUIRE(t.rows.size() == 3);
  CHECK(t.ids == std::vector<int>{1, 2});
  for (const auto &row : t.rows) CHECK(row.converged);
  for (std::size_t s = 0; s < 2; ++s) {
    CHECK(t.rows[2].errors[s].e_T_l2 < t.rows[0].errors[s].e_T_l2);
    CHECK(t.rows[1].k[s] == doctest::Approx(0.5 * t.rows[0].k[s]));
  }
  opt.levels = 2;
  CHECK_THROWS_AS(convergence_study(cfg, opt), ValidationError);
}

TEST_CASE("parameter sweeps") {
  const ExperimentConfig cfg = heat_one_window();
  SweepOptions opt;
  opt.p_values = {1.0};
  opt.max_iterations = 60;
  const auto one = sweep_parameters(cfg, opt);
  REQUIRE(one.size() == 1);
  CHECK(one[0].best);
  CHECK(one[0].converged);

  opt.p_values = {0.1, 0.5, 1, 2};
  const auto rows = sweep_parameters(cfg, opt);
  REQUIRE(rows.size() == 4);
  int best = 0;
  for (const auto &r : rows) best += r.best ? 1 : 0;
  CHECK(best == 1);
  CHECK(sweep_parameters(cfg, opt).at(2).iterations == rows[2].iterations);

  opt.p_values = {};
  CHECK_THROWS_AS(sweep_parameters(cfg, opt), ValidationError);
}

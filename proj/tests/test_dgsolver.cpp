#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <memory>
#include <random>

#include "invariants.hpp"
#include "oswr/analysis.hpp"
#include "oswr/dg_solver.hpp"
#include "oswr/error.hpp"
#include "oswr/linear_solver.hpp"
#include "oswr/oswr.hpp"
#include "test_support.hpp"

using namespace oswr;

namespace {

SparseMatrix scalar(double v) {
  SparseMatrix m(1, 1);
  m.insert(0, 0) = v;
  return m;
}

Eigen::VectorXd vec(double v) { return Eigen::VectorXd::Constant(1, v); }

SparseMatrix poisson(int n) {
  std::vector<Eigen::Triplet<double>> t;
  for (int i = 0; i < n; ++i) {
    t.emplace_back(i, i, 2.0);
    if (i > 0) t.emplace_back(i, i - 1, -1.0);
    if (i + 1 < n) t.emplace_back(i, i + 1, -1.0);
  }
  SparseMatrix a(n, n);
  a.setFromTriplets(t.begin(), t.end());
  return a;
}

ExperimentConfig single(const std::string &body) {
  return parse_config("[domain]\nbox = 0 1 0 1\nT = 1\n" + body);
}

}  // namespace

TEST_CASE("DG(0) steps") {
  const Eigen::VectorXd z = vec(0.0);
  CHECK(step_d0(scalar(1.0), scalar(1.0), vec(1.0), 0.1, z, z)(0) ==
        doctest::Approx(1.0 / 1.1).epsilon(1e-15));
  CHECK(step_d0(scalar(1.0), scalar(3.0), z, 0.1, z, z)(0) == 0.0);
  // u' = 1: the load is int_{I_n} 1 = k.
  CHECK(step_d0(scalar(1.0), scalar(0.0), z, 0.5, vec(0.5), z)(0) == doctest::Approx(0.5));
}

TEST_CASE("DG(1) steps") {
  const Eigen::VectorXd z = vec(0.0);
  SUBCASE("exact for linear solutions") {
    // u' = 1 on (0,1): F_0 = 1, F_1 = int L_1 = 0.
    const auto [u0, u1] = step_d1(scalar(1.0), scalar(0.0), z, 1.0, vec(1.0), z, z, z);
    CHECK(u0(0) == doctest::Approx(0.5));
    CHECK(u1(0) == doctest::Approx(0.5));
  }
  SUBCASE("zero data") {
    const auto [u0, u1] = step_d1(scalar(1.0), scalar(2.0), z, 0.3, z, z, z, z);
    CHECK(u0(0) == 0.0);
    CHECK(u1(0) == 0.0);
  }
  SUBCASE("scalar decay") {
    const auto [u0, u1] = step_d1(scalar(1.0), scalar(1.0), vec(1.0), 1.0, z, z, z, z);
    CHECK(u0(0) == doctest::Approx(7.0 / 11.0).epsilon(1e-15));
    CHECK(u1(0) == doctest::Approx(-3.0 / 11.0).epsilon(1e-15));
    CHECK(u0(0) + u1(0) == doctest::Approx(4.0 / 11.0).epsilon(1e-15));
  }
  SUBCASE("manufactured linear-in-time trajectory") {
    // M U' + A U = F with U(t) = t W.
    const int n = 12;
    const SparseMatrix a = poisson(n);
    Eigen::VectorXd md = Eigen::VectorXd::LinSpaced(n, 0.5, 2.0);
    const SparseMatrix m = Eigen::MatrixXd(md.asDiagonal()).sparseView();
    const Eigen::VectorXd w = Eigen::VectorXd::LinSpaced(n, -1.0, 3.0);
    Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
    const Eigen::VectorXd zn = Eigen::VectorXd::Zero(n);
    double t = 0.0;
    for (double k : {0.1, 0.25, 0.05, 0.6}) {
      const Eigen::VectorXd f0 = k * (m * w + (t + 0.5 * k) * (a * w));
      const Eigen::VectorXd f1 = (k * k / 6.0) * (a * w);
      const auto [c0, c1] = step_d1(m, a, u, k, f0, f1, zn, zn);
      t += k;
      u = c0 + c1;
      CHECK((u - t * w).cwiseAbs().maxCoeff() < 1e-13);
      CHECK((c1 - 0.5 * k * w).cwiseAbs().maxCoeff() < 1e-13);
    }
  }
}

TEST_CASE("system matrix layout") {
  const SparseMatrix m = scalar(2.0), a = scalar(3.0);
  const Eigen::MatrixXd s(dg_system_matrix(m, a, 1, 0.6));
  // rows test with L_0, L_1; A = [[1,-1],[1,1]] transposed into the block
  CHECK(s(0, 0) == doctest::Approx(2.0 + 0.6 * 3.0));
  CHECK(s(0, 1) == doctest::Approx(2.0));
  CHECK(s(1, 0) == doctest::Approx(-2.0));
  CHECK(s(1, 1) == doctest::Approx(2.0 + 0.2 * 3.0));
  const Eigen::MatrixXd s0(dg_system_matrix(m, a, 0, 0.6));
  CHECK(s0(0, 0) == doctest::Approx(2.0 + 0.6 * 3.0));
}

TEST_CASE("linear solves") {
  SparseMatrix id(5, 5);
  id.setIdentity();
  const Eigen::VectorXd rhs = Eigen::VectorXd::LinSpaced(5, 1.0, 5.0);
  CHECK((linear_solve(id, rhs) - rhs).norm() == 0.0);

  const SparseMatrix p = poisson(40);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(40);
  CHECK((linear_solve(p, p * ones) - ones).cwiseAbs().maxCoeff() < 1e-12);

  std::mt19937_64 rng(9);
  std::normal_distribution<double> g;
  Eigen::MatrixXd b(50, 50);
  for (Eigen::Index i = 0; i < b.size(); ++i) b.data()[i] = g(rng);
  const Eigen::MatrixXd spd = b * b.transpose() + 50.0 * Eigen::MatrixXd::Identity(50, 50);
  Eigen::VectorXd r(50);
  for (Eigen::Index i = 0; i < 50; ++i) r(i) = g(rng);
  const SparseMatrix s = spd.sparseView();
  const Eigen::VectorXd x = linear_solve(s, r);
  CHECK((s * x - r).norm() / r.norm() <= 1e-12);
  CHECK((linear_solve(s, r).array() == x.array()).all());

  SparseMatrix sing(2, 2);
  sing.insert(0, 0) = 1.0;
  sing.insert(1, 0) = 1.0;
  CHECK_THROWS_AS(linear_solve(sing, Eigen::VectorXd::Ones(2)), SolverError);
}

TEST_CASE("local windows") {
  SUBCASE("manufactured u = t through the assembled operators") {
    ExperimentConfig cfg = single(
        "exterior_p = 0\nf = \"1+0.5*t\"\n[subdomain]\nid = 1\nbox = 0 1 0 1\n"
        "nu = \"0.1+x*y\"\nc = \"0.5\"\nnx = 4\nny = 5\nnt = 7\n");
    auto ops = std::make_shared<const SubdomainOperators>(assemble_single(cfg, cfg.subdomains[0]));
    LocalSolver solver(ops, Coupling::conforming);
    const TimePartition part({0.0, 0.1, 0.35, 0.4, 0.8, 1.0});
    const auto loads = solver.loads(part);
    const DGTrajectory u = solver.solve_window({}, part, Eigen::VectorXd::Zero(ops->ndofs()), &loads);
    for (std::size_t n = 0; n < part.intervals(); ++n) {
      CHECK((u.right_value(n).array() - part[n + 1]).abs().maxCoeff() < 1e-12);
    }
    CHECK((u.evaluate(0.6).array() - 0.6).abs().maxCoeff() < 1e-12);
  }
  SUBCASE("zero data") {
    ExperimentConfig cfg = load_config(test::config_path("decay.cfg"));
    MultidomainProblem problem(cfg);
    const TimePartition part = problem.window_partition(0, 0);
    const DGTrajectory u = problem.solver(0).solve_window(
        {}, part, Eigen::VectorXd::Zero(problem.operators(0).ndofs()));
    for (const auto &m : u.modes) CHECK(m.cwiseAbs().maxCoeff() == 0.0);
    MultidomainProblem mortar(cfg, Coupling::mortar);
    const auto [um, q] = mortar.solver(0).solve_window_mortar(
        {}, part, Eigen::VectorXd::Zero(problem.operators(0).ndofs()));
    for (const auto &m : um.modes) CHECK(m.cwiseAbs().maxCoeff() == 0.0);
    for (const auto &[id, flux] : q) {
      for (const auto &m : flux.modes) CHECK(m.cwiseAbs().maxCoeff() == 0.0);
    }
  }
  SUBCASE("window chaining") {
    ExperimentConfig cfg = load_config(test::config_path("fixed_point.cfg"));
    cfg.f = Expression::parse("x*t");
    auto ops = std::make_shared<const SubdomainOperators>(assemble_single(cfg, cfg.subdomains[0]));
    LocalSolver solver(ops, Coupling::conforming);
    const Eigen::VectorXd u0 = interpolate(ops->space, cfg.u0);
    const TimePartition whole = TimePartition::uniform(0.0, 1.0, 8);
    const auto loads = solver.loads(whole);
    const DGTrajectory one = solver.solve_window({}, whole, u0, &loads);
    const TimePartition first = TimePartition::uniform(0.0, 0.5, 4);
    const TimePartition second = TimePartition::uniform(0.5, 1.0, 4);
    const auto l1 = solver.loads(first);
    const auto l2 = solver.loads(second);
    const DGTrajectory a = solver.solve_window({}, first, u0, &l1);
    const DGTrajectory b = solver.solve_window({}, second, a.final_value(), &l2);
    CHECK((b.final_value() - one.final_value()).cwiseAbs().maxCoeff() < 1e-13);
    CHECK((a.final_value() - one.right_value(3)).cwiseAbs().maxCoeff() < 1e-13);
  }
  SUBCASE("dissipativity of the assembled operators") {
    ExperimentConfig cfg = load_config(test::config_path("fixed_point.cfg"));
    for (const auto &spec : cfg.subdomains) {
      auto ops = std::make_shared<const SubdomainOperators>(assemble_single(cfg, spec));
      LocalSolver solver(ops, Coupling::conforming);
      const DGTrajectory u = solver.solve_window({}, TimePartition::uniform(0.0, 1.0, 16),
                                                 interpolate(ops->space, cfg.u0));
      double prev = std::sqrt(u.initial.dot(ops->mass_volume * u.initial));
      for (std::size_t n = 0; n < u.intervals(); ++n) {
        const Eigen::VectorXd v = u.right_value(n);
        const double now = std::sqrt(v.dot(ops->mass_volume * v));
        CHECK(now <= prev * (1.0 + 1e-12));
        prev = now;
      }
    }
  }
  SUBCASE("experiment-1 left subdomain at 128 steps") {
    ExperimentConfig cfg = load_config(test::config_path("experiment1.cfg"));
    cfg.subdomains[0].nt = 128;
    MultidomainProblem problem(cfg);
    const TimePartition part = problem.window_partition(0, 0);
    CHECK(part.intervals() == 128);
    const Eigen::VectorXd u0 = problem.initial_value(0);
    const TraceMap g = initial_guess(InitialGuess::from_u0, problem.operators(0), part, u0);
    const DGTrajectory u = problem.solver(0).solve_window(g, part, u0);
    CHECK(u.final_value().allFinite());
    CHECK(u.final_value().norm() > 0.0);
  }
}

TEST_CASE("mortar path on matching meshes") {
  ExperimentConfig cfg = load_config(test::config_path("experiment1_conforming.cfg"));
  MultidomainProblem conforming(cfg, Coupling::conforming);
  MultidomainProblem mortar(cfg, Coupling::mortar);
  std::mt19937_64 rng(4);
  for (std::size_t s = 0; s < 2; ++s) {
    const TimePartition part = conforming.window_partition(s, 0);
    const TraceMap g = random_traces(conforming.operators(s), part, rng);
    const Eigen::VectorXd u0 = conforming.initial_value(s);
    const DGTrajectory a = conforming.solver(s).solve_window(g, part, u0);
    const auto [b, flux] = mortar.solver(s).solve_window_mortar(g, part, u0);
    for (std::size_t j = 0; j < a.modes.size(); ++j) {
      const double scale = a.modes[j].cwiseAbs().maxCoeff();
      CHECK((a.modes[j] - b.modes[j]).cwiseAbs().maxCoeff() <= 1e-10 * scale);
    }
    REQUIRE(flux.size() == 1);
    CHECK(flux.begin()->second.intervals() == part.intervals());
  }
}

TEST_CASE("stiff Robin coefficient in the mortar path") {
  ExperimentConfig cfg = load_config(test::config_path("decay.cfg"));
  for (auto &t : cfg.transmissions) {
    t.p = 1e6;
    t.q = 0.0;
  }
  MultidomainProblem problem(cfg, Coupling::mortar);
  std::mt19937_64 rng(2);
  const TimePartition part = problem.window_partition(1, 0);
  const auto [u, flux] = problem.solver(1).solve_window_mortar(
      random_traces(problem.operators(1), part, rng), part, problem.initial_value(1));
  CHECK(u.final_value().allFinite());
  for (const auto &[id, q] : flux) {
    for (const auto &m : q.modes) CHECK(m.allFinite());
  }
}

TEST_CASE("properties") {
  for (const auto &r : {test::check_pade_endpoint(21, 100), test::check_dg_dissipative(21, 100)}) {
    CAPTURE(r.name);
    CAPTURE(r.worst);
    CHECK(r.passed());
  }
}

#include <doctest.h>

#include <Eigen/Dense>

#include "invariants.hpp"
#include "oswr/error.hpp"
#include "oswr/time_projection.hpp"

using namespace oswr;

TEST_CASE("overlap measures") {
  const TimePartition target({0.0, 1.0});
  const TimePartition source({0.0, 0.5, 1.0});
  const ProjectionMatrices m = build_projection_matrices(source, target, 0);
  const Eigen::MatrixXd b(m.block(0, 0));
  REQUIRE(b.rows() == 1);
  REQUIRE(b.cols() == 2);
  CHECK(b(0, 0) == doctest::Approx(0.5));
  CHECK(b(0, 1) == doctest::Approx(0.5));
}

TEST_CASE("linear mode against a finer target") {
  const ProjectionMatrices m =
      build_projection_matrices(TimePartition({0.0, 1.0}), TimePartition({0.0, 0.5, 1.0}), 1);
  CHECK(Eigen::MatrixXd(m.block(1, 0))(0, 0) == doctest::Approx(-0.25));
  CHECK(Eigen::MatrixXd(m.block(1, 0))(1, 0) == doctest::Approx(0.25));
}

TEST_CASE("identical partitions") {
  const TimePartition p({0.0, 0.1, 0.4, 1.0});
  const ProjectionMatrices m = build_projection_matrices(p, p, 1);
  const Eigen::MatrixXd b00(m.block(0, 0)), b11(m.block(1, 1));
  for (Eigen::Index n = 0; n < 3; ++n) {
    CHECK(b00(n, n) == doctest::Approx(p.length(static_cast<std::size_t>(n))));
    CHECK(b11(n, n) == doctest::Approx(p.length(static_cast<std::size_t>(n)) / 3.0));
  }
  CHECK(b00.sum() == doctest::Approx(1.0));
  CHECK(Eigen::MatrixXd(m.block(0, 1)).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(Eigen::MatrixXd(m.block(1, 0)).cwiseAbs().maxCoeff() < 1e-15);

  PiecewiseField g(p, 1, 2);
  g.modes[0] << 1, 2, 3, 4, 5, 6;
  g.modes[1] << -1, 0.5, 2, 0, 1, -3;
  const PiecewiseField out = apply_projection(m, g);
  CHECK((out.modes[0] - g.modes[0]).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((out.modes[1] - g.modes[1]).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("constants and means") {
  const TimePartition source({0.0, 0.3, 0.35, 0.8, 1.0});
  const TimePartition target({0.0, 0.5, 1.0});
  PiecewiseField c(source, 1, 1);
  c.modes[0].setConstant(2.5);
  const PiecewiseField out = apply_projection(build_projection_matrices(source, target, 1), c);
  CHECK(out.modes[0](0, 0) == doctest::Approx(2.5));
  CHECK(out.modes[0](0, 1) == doctest::Approx(2.5));
  CHECK(std::abs(out.modes[1](0, 0)) < 1e-14);

  PiecewiseField step(TimePartition({0.0, 0.5, 1.0}), 0, 1);
  step.modes[0] << 0.0, 1.0;
  const PiecewiseField mean =
      apply_projection(build_projection_matrices(step.partition, TimePartition({0.0, 1.0}), 0), step);
  CHECK(mean.modes[0](0, 0) == doctest::Approx(0.5));
}

TEST_CASE("invalid inputs") {
  CHECK_THROWS_AS(build_projection_matrices(TimePartition({0.0, 1.0}), TimePartition({0.0, 0.9}), 1),
                  ValidationError);
  CHECK_THROWS(build_projection_matrices(TimePartition(), TimePartition({0.0, 1.0}), 0));
  const ProjectionMatrices m =
      build_projection_matrices(TimePartition({0.0, 1.0}), TimePartition({0.0, 1.0}), 1);
  PiecewiseField wrong(TimePartition({0.0, 0.5, 1.0}), 1, 1);
  CHECK_THROWS(apply_projection(m, wrong));
}

TEST_CASE("hat overlaps") {
  // Mass matrix of one mesh against itself: row sums are the hat integrals.
  const std::vector<double> nodes{0.0, 0.25, 1.0};
  const Eigen::MatrixXd mass(hat_overlap_matrix(nodes, nodes));
  CHECK(mass(0, 0) == doctest::Approx(0.25 / 3));
  CHECK(mass(0, 1) == doctest::Approx(0.25 / 6));
  CHECK(mass.row(1).sum() == doctest::Approx(0.5));
  const Eigen::MatrixXd cross(hat_overlap_matrix(nodes, {0.0, 0.5, 1.0}));
  CHECK(cross.sum() == doctest::Approx(1.0));
  const Eigen::MatrixXd stiff(hat_overlap_matrix(nodes, nodes, true, true));
  CHECK(stiff(0, 0) == doctest::Approx(4.0));
  CHECK(stiff.rowwise().sum().cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("properties") {
  for (const auto &r :
       {test::check_projection_contraction(5, 100), test::check_projection_oracle(5, 100),
        test::check_projection_row_sums(5, 100), test::check_projection_idempotent(5, 100),
        test::check_projection_adjoint(5, 100)}) {
    CAPTURE(r.name);
    CAPTURE(r.worst);
    CHECK(r.passed());
  }
}

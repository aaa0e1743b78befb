#include <doctest.h>

#include <cmath>

#include "invariants.hpp"
#include "oswr/time_basis.hpp"

using namespace oswr;

TEST_CASE("scaled Legendre values") {
  CHECK(legendre_eval(0, 0.3, 0.2, 0.41) == 1.0);
  CHECK(std::abs(legendre_eval(1, 0.3, 0.2, 0.4)) < 1e-15);
  CHECK(legendre_eval(1, 0.3, 0.2, 0.3) == doctest::Approx(-1.0));
  CHECK(legendre_eval(1, 0.3, 0.2, 0.5) == doctest::Approx(1.0));
  CHECK(legendre(2, 1.0) == 1.0);
  CHECK(legendre(2, -1.0) == 1.0);
  CHECK(legendre_derivative(1, 0.2) == 1.0);
}

TEST_CASE("interval tables") {
  const IntervalBasis b = build_interval_basis(1, 0.5);
  CHECK(b.A[0][0] == 1.0);
  CHECK(b.A[0][1] == -1.0);
  CHECK(b.A[1][0] == 1.0);
  CHECK(b.A[1][1] == 1.0);
  CHECK(b.D[1][0] == 2.0);
  CHECK(b.D[0][0] == 0.0);
  CHECK(b.D[0][1] == 0.0);
  CHECK(b.D[1][1] == 0.0);
  CHECK(b.norm2[0] == 0.5);
  CHECK(b.norm2[1] == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
  const IntervalBasis b0 = build_interval_basis(0, 0.25);
  CHECK(b0.A[0][0] == 1.0);
  CHECK(b0.norm2[0] == 0.25);
  CHECK_THROWS(build_interval_basis(2, 1.0));
  CHECK_THROWS(build_interval_basis(1, 0.0));
}

TEST_CASE("Gauss-Radau rules") {
  const RadauRule r0 = gauss_radau(0);
  REQUIRE(r0.nodes.size() == 1);
  CHECK(r0.nodes[0] == 1.0);
  CHECK(r0.weights[0] == 1.0);
  const RadauRule r1 = gauss_radau(1);
  REQUIRE(r1.nodes.size() == 2);
  CHECK(r1.nodes[0] == doctest::Approx(1.0 / 3.0));
  CHECK(r1.nodes[1] == 1.0);
  CHECK(r1.weights[0] == doctest::Approx(0.75));
  CHECK(r1.weights[1] == doctest::Approx(0.25));
  double s = 0.0;
  for (std::size_t q = 0; q < 2; ++q) s += r1.weights[q] * r1.nodes[q] * r1.nodes[q];
  CHECK(s == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK_THROWS(gauss_radau(2));
}

TEST_CASE("lift") {
  SUBCASE("d=0 constant") {
    const auto c = lift(std::vector<double>{2.5}, 2.5);
    CHECK(c[0] == 2.5);
    CHECK(c[1] == 0.0);
  }
  SUBCASE("d=0 linear interpolant") {
    const auto c = lift(std::vector<double>{1.0}, 0.0);
    for (double t : {0.0, 0.25, 0.7, 1.0}) {
      CHECK(legendre_sum(c, 0.0, 1.0, t) == doctest::Approx(t));
    }
  }
  SUBCASE("d=1 constant") {
    const auto c = lift(std::vector<double>{1.0, 0.0}, 1.0);
    CHECK(c[0] == doctest::Approx(1.0));
    CHECK(c[1] == doctest::Approx(0.0).scale(1.0));
    CHECK(c[2] == doctest::Approx(0.0).scale(1.0));
  }
  SUBCASE("d=1 interpolates at the Radau nodes and the left end") {
    const std::vector<double> u{0.3, -0.8};
    const double left = 1.7, t0 = 0.4, k = 0.3;
    const auto c = lift(u, left);
    CHECK(legendre_sum(c, t0, k, t0) == doctest::Approx(left));
    for (double tau : gauss_radau(1).nodes) {
      const double t = t0 + tau * k;
      CHECK(legendre_sum(c, t0, k, t) == doctest::Approx(legendre_sum(u, t0, k, t)));
    }
    const auto dc = lift_derivative(u, left, k);
    const double h = 1e-6;
    for (double t : {0.45, 0.55, 0.65}) {
      const double fd = (legendre_sum(c, t0, k, t + h) - legendre_sum(c, t0, k, t - h)) / (2 * h);
      CHECK(legendre_sum(dc, t0, k, t) == doctest::Approx(fd).epsilon(1e-7));
    }
  }
}

TEST_CASE("interval projection") {
  const auto c = project_interval([](double) { return 3.0; }, 0.2, 0.5, 1);
  CHECK(c[0] == doctest::Approx(3.0));
  CHECK(c[1] == doctest::Approx(0.0).scale(1.0));
  const auto t = project_interval([](double s) { return s; }, 0.0, 1.0, 1);
  CHECK(t[0] == doctest::Approx(0.5));
  CHECK(t[1] == doctest::Approx(0.5));
  const auto t2 = project_interval([](double s) { return s * s; }, 0.0, 1.0, 0);
  CHECK(t2[0] == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("partitions") {
  const TimePartition p = TimePartition::uniform(0.0, 1.0, 4);
  CHECK(p.intervals() == 4);
  CHECK(p.locate(0.0) == 0);
  CHECK(p.locate(0.25) == 0);
  CHECK(p.locate(0.2500001) == 1);
  CHECK(p.locate(1.0) == 3);
  CHECK_THROWS(TimePartition({0.0, 0.5, 0.5, 1.0}));
}

TEST_CASE("properties") {
  for (const auto &r : {test::check_interval_tables(3, 100), test::check_radau_exactness(3, 0),
                        test::check_radau_lift(3, 100), test::check_lift_inequality(3, 100),
                        test::check_pade_endpoint(3, 100), test::check_dg_dissipative(3, 100)}) {
    CAPTURE(r.name);
    CAPTURE(r.worst);
    CHECK(r.passed());
  }
}

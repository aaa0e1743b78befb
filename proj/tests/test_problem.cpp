#include <doctest.h>

#include <cmath>
#include <string>

#include "oswr/config.hpp"
#include "oswr/error.hpp"
#include "oswr/expression.hpp"
#include "oswr/validate.hpp"
#include "test_support.hpp"

using namespace oswr;

namespace {

// Experiment-1 setup with its published grids.
const char *kExperiment1 = R"CFG(
[domain]
box = 0 1 0 2
T = 1
u0 = "0.25*exp(-100*((x-0.55)^2+(y-1.7)^2))"

[subdomain]
id = 1
box = 0 0.5 0 2
nu = "0.001*sqrt(y)"
bx = "0"
by = "-1"
nx = 16
ny = 64
nt = 128

[subdomain]
id = 2
box = 0.5 1 0 2
nu = "0.1*sin(x*y)"
bx = "-0.1"
by = "0"
nx = 12
ny = 48
nt = 94

[transmission]
from = 1
to = 2
p = 0.5
q = 0.01
r = "-1"
s = 0.046

[transmission]
from = 2
to = 1
p = 0.5
q = 0.01
r = "0"
s = 0.00094
)CFG";

std::string two_boxes(const std::string &box2, double p12, double p21) {
  return R"CFG(
[domain]
box = 0 1
T = 1
[subdomain]
id = 1
box = 0 0.5
nx = 4
[subdomain]
id = 2
box = )CFG" + box2 + R"CFG(
nx = 4
[transmission]
from = 1
to = 2
p = )CFG" + std::to_string(p12) + R"CFG(
[transmission]
from = 2
to = 1
p = )CFG" + std::to_string(p21) + "\n";
}

bool has_error(const std::vector<Diagnostic> &d) {
  for (const auto &x : d) {
    if (x.is_error()) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("experiment-1 diffusion parses from its closed form") {
  const ExperimentConfig cfg = parse_config(kExperiment1);
  const SubdomainSpec &s1 = cfg.subdomain(1);
  CHECK(s1.nu(0.3, 0.64) == doctest::Approx(0.001 * 0.8).epsilon(1e-15));
  CHECK(cfg.subdomain(2).nu(0.5, 2.0) == doctest::Approx(0.0841470985).epsilon(1e-9));
  CHECK(cfg.u0(0.55, 1.7) == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("omitted omega defaults to one") {
  const ExperimentConfig cfg = parse_config(kExperiment1);
  CHECK(cfg.subdomain(1).omega.is_constant());
  CHECK(cfg.subdomain(1).omega(0.2, 0.3) == 1.0);
}

TEST_CASE("dangling operator is a syntax error with its position") {
  const std::string text = "[domain]\nbox = 0 1\nT = 1\n[subdomain]\nid = 1\nbox = 0 1\nnu = \"x +\"\n";
  try {
    parse_config(text);
    FAIL("expected a parse error");
  } catch (const ParseError &e) {
    CHECK(e.line() == 7);
    CHECK(e.column() >= 9);
  }
  CHECK_THROWS_AS(Expression::parse("x +"), ParseError);
  CHECK_THROWS_AS(Expression::parse("sin(x"), ParseError);
  CHECK_THROWS_AS(Expression::parse("foo(x)"), ParseError);
}

TEST_CASE("coefficient evaluation") {
  CHECK(Expression::parse("1")(0.3, 0.7, 0.1) == 1.0);
  CHECK(Expression::parse("0.1*sin(x*y)")(0.5, 2.0) == doctest::Approx(0.1 * std::sin(1.0)));
  CHECK(Expression::parse("2^3^2")(0.0) == 512.0);
  CHECK(Expression::parse("-x^2")(3.0) == -9.0);
  CHECK(Expression::parse("t*abs(x-1)")(0.0, 0.0, 2.0) == 2.0);
  CHECK_THROWS_AS(Expression::parse("sqrt(x)")(-1.0), DomainError);
  CHECK_THROWS_AS(Expression::parse("1/x")(0.0), DomainError);
}

TEST_CASE("evaluation is pure") {
  const Expression e = Expression::parse("0.25*exp(-100*((x-0.55)^2+(y-1.7)^2))+sin(x*y)/3");
  const double a = e(0.123, 0.456);
  for (int i = 0; i < 100; ++i) REQUIRE(e(0.123, 0.456) == a);
}

TEST_CASE("symbolic derivatives") {
  const Expression e = Expression::parse("x^2*y + sin(y)");
  CHECK(e.derivative(Variable::x)(0.5, 0.3) == doctest::Approx(2 * 0.5 * 0.3));
  CHECK(e.derivative(Variable::y)(0.5, 0.3) == doctest::Approx(0.25 + std::cos(0.3)));
  CHECK(Expression::parse("3").derivative(Variable::x).is_constant());
}

TEST_CASE("parse, serialize, parse is idempotent") {
  for (const char *name : {"experiment1.cfg", "experiment1_d0.cfg", "porosity.cfg",
                           "fixed_point.cfg", "decay.cfg", "heat1d.cfg"}) {
    CAPTURE(name);
    const ExperimentConfig a = load_config(test::config_path(name));
    const std::string once = serialize_config(a);
    const ExperimentConfig b = parse_config(once);
    CHECK(serialize_config(b) == once);
    CHECK(b.subdomains.size() == a.subdomains.size());
    CHECK(b.u0(0.31, 0.77) == a.u0(0.31, 0.77));
  }
  const std::string once = serialize_config(parse_config(kExperiment1));
  CHECK(serialize_config(parse_config(once)) == once);
}

TEST_CASE("malformed documents") {
  CHECK_THROWS_AS(parse_config("[subdomain]\nid = 1\nbox = 0 1\n"), ParseError);
  CHECK_THROWS_AS(parse_config("[domain]\nbox = 0 1\nT = 1\nbogus = 3\n"), ParseError);
  CHECK_THROWS_AS(parse_config("[domain]\nbox = 0 1\nT = 1\nT = 2\n"), ParseError);
  CHECK_THROWS_AS(parse_config("[nowhere]\n"), ParseError);
  // by in a 1D problem
  CHECK_THROWS_AS(parse_config("[domain]\nbox = 0 1\nT = 1\n[subdomain]\nid = 1\nbox = 0 1\n"
                               "by = \"1\"\n"),
                  ParseError);
  // more than one subdomain but no transmission section
  CHECK_THROWS_AS(parse_config("[domain]\nbox = 0 1\nT = 1\n[subdomain]\nid = 1\nbox = 0 0.5\n"
                               "[subdomain]\nid = 2\nbox = 0.5 1\n"),
                  ParseError);
}

TEST_CASE("validation") {
  SUBCASE("experiment 1 carries only warnings") {
    const auto d = validate_problem(parse_config(kExperiment1));
    CHECK_FALSE(has_error(d));
    CHECK(d.size() >= 1);
  }
  SUBCASE("p12 = p21 = 0 is rejected") {
    CHECK(has_error(validate_problem(parse_config(two_boxes("0.5 1", 0.0, 0.0)))));
    CHECK_FALSE(has_error(validate_problem(parse_config(two_boxes("0.5 1", 0.0, 1.0)))));
  }
  SUBCASE("overlapping boxes are rejected") {
    CHECK(has_error(validate_problem(parse_config(two_boxes("0.4 1", 1.0, 1.0)))));
  }
  SUBCASE("gaps are rejected") {
    CHECK(has_error(validate_problem(parse_config(two_boxes("0.6 1", 1.0, 1.0)))));
  }
  SUBCASE("nonpositive diffusion is rejected") {
    ExperimentConfig cfg = parse_config(two_boxes("0.5 1", 1.0, 1.0));
    cfg.subdomains[1].nu = Expression::parse("x-0.75");
    CHECK(has_error(validate_problem(cfg)));
    CHECK_THROWS_AS(require_valid(validate_problem(cfg)), ValidationError);
  }
  SUBCASE("order 2 needs s > 0") {
    ExperimentConfig cfg = parse_config(kExperiment1);
    cfg.transmissions[0].s = 0.0;
    CHECK(has_error(validate_problem(cfg)));
  }
  SUBCASE("degree above one is rejected") {
    ExperimentConfig cfg = parse_config(two_boxes("0.5 1", 1.0, 1.0));
    for (auto &s : cfg.subdomains) s.degree = 2;
    CHECK(has_error(validate_problem(cfg)));
  }
}

TEST_CASE("adjacency") {
  const auto pairs = adjacent_pairs(parse_config(kExperiment1));
  REQUIRE(pairs.size() == 1);
  CHECK(pairs[0] == std::pair<int, int>{1, 2});
}

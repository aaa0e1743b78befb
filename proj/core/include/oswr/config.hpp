#ifndef OSWR_CONFIG_HPP_
#define OSWR_CONFIG_HPP_

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "oswr/expression.hpp"

namespace oswr {

/// Axis-aligned interval (dim 1) or rectangle (dim 2).
struct Box {
  int dim = 1;
  double x0 = 0.0, x1 = 1.0;
  double y0 = 0.0, y1 = 0.0;

  double measure() const { return dim == 1 ? x1 - x0 : (x1 - x0) * (y1 - y0); }
  bool contains(double x, double y, double tol = 1e-12) const;

  friend bool operator==(const Box &, const Box &) = default;
};

struct SubdomainSpec {
  int id = 0;
  Box box;
  Expression nu = Expression::constant(1.0);
  Expression bx;
  Expression by;
  Expression c;
  Expression omega = Expression::constant(1.0);
  int nx = 8;
  int ny = 8;
  int nt = 16;  ///< time intervals per window
  int degree = 1;
};

/// Transmission operator data for the directed interface from -> to, i.e.
/// the condition imposed in subdomain `from` on its boundary with `to`.
struct TransmissionSpec {
  int from = 0;
  int to = 0;
  double p = 1.0;
  double q = 0.0;
  Expression r;
  double s = 0.0;

  bool is_order2() const { return q > 0.0; }
};

enum class InitialGuess { zero, from_u0 };

struct ExperimentConfig {
  Box domain;
  double T = 0.0;
  int windows = 1;
  double tolerance = 1e-8;
  int max_iterations = 50;
  InitialGuess initial_guess = InitialGuess::from_u0;
  Expression u0;
  Expression f;
  /// Robin coefficient of the absorbing closure on the exterior boundary.
  double exterior_p = 1.0;
  /// Output times for solution snapshots; empty means {T}.
  std::vector<double> snapshots;
  std::vector<SubdomainSpec> subdomains;
  std::vector<TransmissionSpec> transmissions;

  int dimension() const { return domain.dim; }
  const SubdomainSpec &subdomain(int id) const;
  /// Null when the directed pair has no section.
  const TransmissionSpec *transmission(int from, int to) const;
  TransmissionSpec *transmission(int from, int to);
};

/// Parses the line-oriented configuration format. Throws ParseError with the
/// offending line (and column when known).
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path &path);

/// Canonical text form; parse_config(serialize_config(c)) reproduces c.
std::string serialize_config(const ExperimentConfig &cfg);

}  // namespace oswr

#endif  // OSWR_CONFIG_HPP_

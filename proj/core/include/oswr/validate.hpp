#ifndef OSWR_VALIDATE_HPP_
#define OSWR_VALIDATE_HPP_

#include <string>
#include <vector>

#include "oswr/config.hpp"

namespace oswr {

struct Diagnostic {
  enum class Severity { warning, error };
  Severity severity = Severity::error;
  std::string message;

  bool is_error() const { return severity == Severity::error; }
};

/// Checks hard constraints (errors) and the coercivity assumption
/// c + div(b)/2 > 0 (warning). Sign conditions are sampled on a 16 x 16
/// cell-centred lattice per subdomain.
std::vector<Diagnostic> validate_problem(const ExperimentConfig &cfg);

/// Throws ValidationError listing every error diagnostic, if any.
void require_valid(const std::vector<Diagnostic> &diagnostics);

/// Pairs of subdomain ids sharing an interface of positive measure (a
/// point in 1D), with i < j.
std::vector<std::pair<int, int>> adjacent_pairs(const ExperimentConfig &cfg);

}  // namespace oswr

#endif  // OSWR_VALIDATE_HPP_

#ifndef OSWR_TESTS_INVARIANTS_HPP_
#define OSWR_TESTS_INVARIANTS_HPP_

#include <cstdint>
#include <string>
#include <vector>

namespace oswr::test {

/// Outcome of one randomized property check: the worst violation seen
/// against its allowance.
struct PropertyResult {
  std::string name;
  int trials = 0;
  double worst = 0.0;
  double tolerance = 0.0;

  bool passed() const { return worst <= tolerance; }
};

PropertyResult check_interval_tables(std::uint64_t seed, int trials);
PropertyResult check_radau_exactness(std::uint64_t seed, int trials);
PropertyResult check_radau_lift(std::uint64_t seed, int trials);
PropertyResult check_lift_inequality(std::uint64_t seed, int trials);
PropertyResult check_projection_contraction(std::uint64_t seed, int trials);
PropertyResult check_projection_oracle(std::uint64_t seed, int trials);
PropertyResult check_projection_row_sums(std::uint64_t seed, int trials);
PropertyResult check_projection_idempotent(std::uint64_t seed, int trials);
PropertyResult check_projection_adjoint(std::uint64_t seed, int trials);
PropertyResult check_energy_identity(std::uint64_t seed, int trials);
PropertyResult check_pade_endpoint(std::uint64_t seed, int trials);
PropertyResult check_advection_skew(std::uint64_t seed, int trials);
PropertyResult check_dg_dissipative(std::uint64_t seed, int trials);

/// Every property above with its default trial count.
std::vector<PropertyResult> run_all_invariants(std::uint64_t seed);

}  // namespace oswr::test

#endif  // OSWR_TESTS_INVARIANTS_HPP_

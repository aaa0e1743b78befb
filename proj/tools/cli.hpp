#ifndef OSWR_TOOLS_CLI_HPP_
#define OSWR_TOOLS_CLI_HPP_

#include <iosfwd>
#include <string>
#include <vector>

namespace oswr::cli {

enum ExitCode : int {
  kSuccess = 0,
  kInternal = 1,
  kUsage = 2,   // bad arguments, unreadable or invalid configuration
  kSolver = 3,  // linear solver breakdown or divergence
};

/// Entry point of the `oswr` executable; returns the process exit code.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

/// Splits "0.1,0.5,1" into numbers; throws on malformed entries.
std::vector<double> parse_list(const std::string &text);

/// Shortest text with 17 significant digits.
std::string format_double(double v);

}  // namespace oswr::cli

#endif  // OSWR_TOOLS_CLI_HPP_

#ifndef OSWR_ERROR_HPP_
#define OSWR_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace oswr {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed configuration or expression text. Line and column are 1-based;
/// zero means "not applicable".
class ParseError : public Error {
 public:
  ParseError(const std::string &message, int line, int column)
      : Error(format(message, line, column)), line_(line), column_(column) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  static std::string format(const std::string &message, int line, int column) {
    if (line <= 0 && column <= 0) return message;
    std::string where = line > 0 ? "line " + std::to_string(line) : "";
    if (column > 0) {
      if (!where.empty()) where += ", ";
      where += "column " + std::to_string(column);
    }
    return where + ": " + message;
  }

  int line_;
  int column_;
};

/// Arithmetic domain violation while evaluating a coefficient (sqrt of a
/// negative number, division by zero, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A problem that violates a hard constraint (bad parameters, bad geometry,
/// incompatible grids).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Linear solver breakdown or numerical divergence.
class SolverError : public Error {
 public:
  SolverError(const std::string &message, double residual)
      : Error(message), residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace oswr

#endif  // OSWR_ERROR_HPP_

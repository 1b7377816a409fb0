#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace kt {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A documented precondition was violated by the caller.
class ContractError : public Error {
 public:
  using Error::Error;
};

/// An exact oracle was asked to enumerate a space beyond its cap.
class OracleTooLargeError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file or JSON document.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// A probability argument was exactly 0 or 1 where the log-odds are undefined.
class DegenerateProbabilityError : public Error {
 public:
  using Error::Error;
};

/// Optimizer exhausted its iteration budget; carries the best iterate seen.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& msg, std::vector<double> best_weights,
                   double best_objective)
      : Error(msg),
        best_weights(std::move(best_weights)),
        best_objective(best_objective) {}

  std::vector<double> best_weights;
  double best_objective;
};

}  // namespace kt

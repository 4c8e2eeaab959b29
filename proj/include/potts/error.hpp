#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace potts {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands built for different (q, n).
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A parameter outside the domain of an operation.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Requested operation is not defined for these parameters (e.g. q = 2 phase formulas).
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

/// Brute-force enumeration would exceed the configured state cap.
class FeasibilityError : public Error {
 public:
  FeasibilityError(const std::string& what, unsigned long long cap)
      : Error(what + " (cap " + std::to_string(cap) + " states)"), cap_(cap) {}
  unsigned long long cap() const noexcept { return cap_; }

 private:
  unsigned long long cap_;
};

/// An iterative solver failed; carries the iterate trace for diagnosis.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, std::vector<std::string> trace = {})
      : Error(what), trace_(std::move(trace)) {}
  const std::vector<std::string>& trace() const noexcept { return trace_; }

 private:
  std::vector<std::string> trace_;
};

/// Inputs that contradict each other, e.g. a stale maximizer value.
class InconsistencyError : public Error {
 public:
  using Error::Error;
};

}  // namespace potts

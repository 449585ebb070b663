#pragma once

#include <stdexcept>
#include <string>

namespace heavytail {

// Rejected input: malformed config, violated type invariant, bad argument.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

// A computation that could not produce a trustworthy number.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// An operation was called before its statistical precondition was established.
class PreconditionError : public std::logic_error {
 public:
  explicit PreconditionError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace heavytail

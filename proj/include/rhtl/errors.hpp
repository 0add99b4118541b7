#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rhtl {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what + " at position " + std::to_string(position)),
        position_(position) {}

  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// Malformed input data: unknown propositions, bad file contents, invariant
/// violations detected at a module boundary.
class InputError : public Error {
 public:
  using Error::Error;
};

/// A horizon problem had no feasible trajectory.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

}  // namespace rhtl

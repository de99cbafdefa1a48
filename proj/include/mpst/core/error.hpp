#pragma once

#include <stdexcept>
#include <string>

namespace mpst {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A type or process violates a structural invariant (self-communication,
/// duplicate labels, unbound or unguarded recursion variables).
class WellFormednessError : public Error {
 public:
  explicit WellFormednessError(std::string reason)
      : Error("ill-formed: " + reason), reason_(std::move(reason)) {}
  const std::string& reason() const { return reason_; }

 private:
  std::string reason_;
};

}  // namespace mpst

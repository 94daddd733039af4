#pragma once

#include <stdexcept>
#include <string>

namespace mgmax {

/// Raised when an input violates an operation's contract (bad tree, bad
/// exponent, unknown node, ...).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a file cannot be parsed into a model, coefficient family or
/// Sawyer instance.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised by the require_* helpers when a verified inequality fails. The
/// inequalities are theorems, so this always indicates a bug.
class VerificationFailure : public std::runtime_error {
 public:
  VerificationFailure(std::string link, const std::string& what)
      : std::runtime_error(what), link_(std::move(link)) {}

  const std::string& link() const noexcept { return link_; }

 private:
  std::string link_;
};

}  // namespace mgmax

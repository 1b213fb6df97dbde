#pragma once

#include <stdexcept>
#include <string>

namespace qthresh {

/// Malformed input text. `line` is 1-based, 0 when not line-specific.
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& what)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// A desk-scale enumeration cap would be exceeded.
class CapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A documented precondition of a proof-machinery operation does not hold.
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Input for which the requested construction is undefined (e.g. λ_∅ ≥ 1).
class DegenerateInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace qthresh

#pragma once

#include <stdexcept>
#include <string>

namespace coexist {

/// Precondition failure on a public operation.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A MAC state machine received an event that is illegal in its current phase.
class ProtocolViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Malformed information element or beacon body.
class DecodeError : public std::runtime_error {
 public:
  DecodeError(int element_id, const std::string& what)
      : std::runtime_error("element " + std::to_string(element_id) + ": " + what),
        element_id_(element_id) {}

  int element_id() const noexcept { return element_id_; }

 private:
  int element_id_;
};

class EncodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad scenario/config input. Carries the offending key when there is one.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Broken simulator invariant (event ordering, ED politeness, airtime).
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace coexist

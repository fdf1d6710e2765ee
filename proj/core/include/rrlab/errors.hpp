#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace rrlab {

// Base for everything thrown by this library.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Tensor/vector shapes do not conform.
class DimensionError : public Error {
public:
  using Error::Error;
};

// A scalar argument is outside its legal range.
class ParameterError : public Error {
public:
  using Error::Error;
};

// A documented precondition was violated by the caller.
class ContractViolation : public Error {
public:
  using Error::Error;
};

// Operation cannot run yet (e.g. replay buffer below batch size).
class NotReadyError : public Error {
public:
  using Error::Error;
};

// Lookup failed; carries the offending key.
class KeyError : public Error {
public:
  KeyError(const std::string& key, const std::string& msg)
      : Error(msg + " (key: " + key + ")"), key_(key) {}
  const std::string& key() const { return key_; }

private:
  std::string key_;
};

// File or stream level failure.
class IoError : public Error {
public:
  using Error::Error;
};

// Spec/config validation failure; collects every violation found.
class ValidationError : public Error {
public:
  explicit ValidationError(std::vector<std::string> violations)
      : Error(join(violations)), violations_(std::move(violations)) {}
  const std::vector<std::string>& violations() const { return violations_; }

private:
  static std::string join(const std::vector<std::string>& v) {
    std::string out = "validation failed:";
    for (const auto& s : v) out += "\n  - " + s;
    return out;
  }
  std::vector<std::string> violations_;
};

}  // namespace rrlab

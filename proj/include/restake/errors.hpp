#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace restake {

// Malformed or invalid input. Maps to CLI exit code 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// 0/0-style situations: a service with value at stake but zero total stake
// behind it. A flavor of input error.
class DegenerateInputError : public InputError {
 public:
  using InputError::InputError;
};

// A plan failed structural validation. Carries one message per offender.
class ValidationError : public InputError {
 public:
  ValidationError(const std::string& what, std::vector<std::string> issues)
      : InputError(what), issues_(std::move(issues)) {}
  const std::vector<std::string>& issues() const { return issues_; }

 private:
  std::vector<std::string> issues_;
};

// Instance too large for exact enumeration. Maps to CLI exit code 3.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An operation that requires a secure input was given an insecure one.
// Carries the profitable coalition found. Maps to CLI exit code 1.
class InsecureInputError : public std::runtime_error {
 public:
  InsecureInputError(const std::string& what, std::vector<std::uint32_t> coalition)
      : std::runtime_error(what), coalition_(std::move(coalition)) {}
  const std::vector<std::uint32_t>& coalition() const { return coalition_; }

 private:
  std::vector<std::uint32_t> coalition_;
};

}  // namespace restake

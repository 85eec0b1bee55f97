#pragma once

#include <stdexcept>
#include <string>

namespace swaptest {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class OutOfRangeError : public Error {
 public:
  using Error::Error;
};

class LayoutError : public Error {
 public:
  using Error::Error;
};

// Truncated Fock space too small for the requested state or dynamics.
class TruncationError : public Error {
 public:
  using Error::Error;
};

class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

// Antisymmetric branch requested for inputs with |s| = 1.
class UndefinedBranchError : public Error {
 public:
  using Error::Error;
};

// Postselected measurement outcome has negligible probability.
class InfeasibleBranchError : public Error {
 public:
  using Error::Error;
};

// No closed form exists for the requested plan; use a simulation engine.
class NotDerivedError : public Error {
 public:
  using Error::Error;
};

class IntegratorError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace swaptest

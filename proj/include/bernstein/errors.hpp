#pragma once

#include <stdexcept>
#include <string>

namespace bernstein {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A parameter is outside its admissible set (rho > 1, alpha <= 0, ...).
class InvalidParameter : public Error {
public:
  using Error::Error;
};

/// An argument is outside the domain of a function (s < 0, u <= 0, nonfinite z).
class DomainError : public Error {
public:
  using Error::Error;
};

/// A closed-form root does not exist for the given input.
class NoRootError : public DomainError {
public:
  using DomainError::DomainError;
};

/// A caller broke a documented precondition (unstandardized design, ...).
class ContractViolation : public Error {
public:
  using Error::Error;
};

/// Malformed or inconsistent data (parse errors, dimension mismatches, labels).
class DataError : public Error {
public:
  using Error::Error;
};

/// A numerical procedure produced a nonfinite value.
class NumericalError : public Error {
public:
  using Error::Error;
};

}  // namespace bernstein

#pragma once

#include <stdexcept>
#include <string>

namespace logconvex {

/// Base of every error thrown by the library.
class Error : public std::runtime_error
{
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the operation's domain (dimension, t < 0, 0 not in K, ...).
class DomainError : public Error
{
 public:
  using Error::Error;
};

/// An integrand or oracle produced a non-finite value.
class EvaluationError : public Error
{
 public:
  EvaluationError(const std::string& what, double where)
      : Error(what + " (at " + std::to_string(where) + ")")
      , where_(where)
  {
  }

  double where() const noexcept { return where_; }

 private:
  double where_;
};

/// A search or integral failed to terminate before its hard cap.
class DivergenceError : public Error
{
 public:
  using Error::Error;
};

/// Root search started below the target.
class NoRootError : public Error
{
 public:
  using Error::Error;
};

/// Affinely dependent points, unbounded H-polytope, zero-volume body where one is required.
class DegenerateBodyError : public Error
{
 public:
  using Error::Error;
};

/// The requested operation needs structure this representation does not have.
class UnsupportedKindError : public Error
{
 public:
  using Error::Error;
};

/// Two routes to the same quantity disagree beyond tolerance.
class ConsistencyError : public Error
{
 public:
  using Error::Error;
};

/// Malformed or missing input document.
class InputError : public Error
{
 public:
  using Error::Error;
};

}  // namespace logconvex

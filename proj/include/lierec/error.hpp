#pragma once

#include <stdexcept>
#include <string>

namespace lierec {

/// Base of every error raised by the library.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Shape or kind mismatch between operands.
class DimensionError : public Error
{
public:
  using Error::Error;
};

/// Input violates a domain invariant (group membership, file schema, branch cut).
class DomainError : public Error
{
public:
  using Error::Error;
};

/// Singular matrix, NaN loss, or another floating-point breakdown.
class NumericalError : public Error
{
public:
  using Error::Error;
};

/// Malformed or inconsistent persisted data.
class FormatError : public Error
{
public:
  using Error::Error;
};

}  // namespace lierec

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace illumina {

/// Base of every exception thrown by the library. The C API maps the
/// subclasses onto its status codes.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
  using Error::Error;
};

class DimensionError : public Error {
public:
  using Error::Error;
};

/// A truncated Fock representation would need more levels than the policy allows.
class TruncationOverflow : public Error {
public:
  TruncationOverflow(const std::string& what, std::size_t required_dim)
      : Error(what + " (required dimension " + std::to_string(required_dim) + ")"),
        required_dim_(required_dim) {}

  std::size_t required_dim() const noexcept { return required_dim_; }

private:
  std::size_t required_dim_;
};

class NumericalError : public Error {
public:
  using Error::Error;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

} // namespace illumina

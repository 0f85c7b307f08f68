#pragma once

#include <stdexcept>
#include <string>

namespace la3 {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input data violates a documented file or value contract.
class DataError : public Error {
 public:
  using Error::Error;
};

/// A third-party process, service or filesystem operation failed.
class ExternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace la3

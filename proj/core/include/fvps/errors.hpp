#pragma once

#include <stdexcept>
#include <string>

namespace fvps {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes or bases disagree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Grids or options that cannot be used together.
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

/// Grid or basis too coarse / too small for the requested object.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

class ConditioningError : public Error {
 public:
  using Error::Error;
};

/// Fock expansion tail is not negligible at the requested cutoff.
class TruncationError : public Error {
 public:
  using Error::Error;
  TruncationError(const std::string& what, std::size_t suggested)
      : Error(what), suggested_n_max(suggested) {}
  std::size_t suggested_n_max = 0;
};

class SamplingError : public Error {
 public:
  using Error::Error;
};

class StepSizeError : public Error {
 public:
  using Error::Error;
};

/// Logarithm requested of a kernel that vanishes everywhere.
class UndefinedLogError : public Error {
 public:
  using Error::Error;
};

}  // namespace fvps

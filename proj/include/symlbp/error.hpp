#pragma once

#include <stdexcept>
#include <string>

namespace symlbp {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Unsupported or malformed file contents.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Image or region dimensions too small for a 3x3 neighborhood.
class SizeError : public Error {
 public:
  using Error::Error;
};

class BoundsError : public Error {
 public:
  using Error::Error;
};

class ArgumentError : public Error {
 public:
  using Error::Error;
};

class EmptyRegionError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatchError : public Error {
 public:
  using Error::Error;
};

/// Training data that does not define a two-sided problem.
class DegenerateDataError : public Error {
 public:
  using Error::Error;
};

class EmptyDatasetError : public Error {
 public:
  using Error::Error;
};

class InfeasibleSplitError : public Error {
 public:
  using Error::Error;
};

/// Wraps an error raised inside a pipeline stage; what() is "[stage] message".
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& message)
      : Error("[" + stage + "] " + message), stage_(std::move(stage)) {}

  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

}  // namespace symlbp

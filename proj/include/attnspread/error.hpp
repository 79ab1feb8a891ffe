#pragma once

#include <stdexcept>
#include <string>

namespace attnspread {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument (k out of range, non-positive cell size, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

class OutOfBoundsError : public Error {
 public:
  using Error::Error;
};

/// All selected attention weights are zero, so no mean can be formed.
class DegenerateAttentionError : public Error {
 public:
  using Error::Error;
};

/// Covariance matrix is not positive semi-definite beyond roundoff.
class InvalidCovarianceError : public Error {
 public:
  using Error::Error;
};

/// Percentile requested from an empty sample set.
class EmptyBinError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file.  Carries the offending file and byte offset when known.
class FormatError : public Error {
 public:
  FormatError(const std::string& file, long long offset, const std::string& what)
      : Error(file + (offset >= 0 ? " @" + std::to_string(offset) : std::string()) + ": " +
              what),
        file_(file),
        offset_(offset) {}

  const std::string& file() const noexcept { return file_; }
  long long offset() const noexcept { return offset_; }

 private:
  std::string file_;
  long long offset_;
};

class MissingFileError : public Error {
 public:
  using Error::Error;
};

/// Input files are individually well formed but disagree with each other.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace attnspread

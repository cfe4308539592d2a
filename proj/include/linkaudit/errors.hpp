#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace linkaudit {

/// Human-readable notes emitted by tolerant operations that skip bad input
/// instead of aborting.
using Diagnostics = std::vector<std::string>;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad flags, unknown format tokens, missing input files.
class UsageError : public Error {
 public:
  using Error::Error;
};

/// A statistic was requested over a dataset with nothing to count.
class EmptyDataset : public Error {
 public:
  using Error::Error;
};

/// A file could not be read or failed schema validation. `line` is 1-based,
/// 0 when the error is not tied to a line.
class LoadError : public Error {
 public:
  LoadError(std::string source, std::size_t line, const std::string& what);

  const std::string& source() const noexcept { return source_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string source_;
  std::size_t line_;
};

class MalformedTimeMap : public Error {
 public:
  using Error::Error;
};

/// Joined evidence disagrees about which URL it describes. Indicates a
/// pipeline bug, never bad input data.
class IntegrityError : public Error {
 public:
  using Error::Error;
};

/// The archive endpoint failed for every URL in a run.
class NetworkAbort : public Error {
 public:
  using Error::Error;
};

}  // namespace linkaudit

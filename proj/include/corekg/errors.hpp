#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace corekg {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Raised by the N-Triples and query parsers. `offset` is the byte position
// of the offending character in the parsed text, or npos when unknown.
class ParseError : public Error {
 public:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  explicit ParseError(const std::string& what, std::size_t offset = npos)
      : Error(offset == npos ? what : what + " (at byte " + std::to_string(offset) + ")"),
        offset_(offset) {}

  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// A sampling distribution cannot be formed: no query in the workload matched
// anything, so every sensitivity is zero.
class NoSignalError : public Error {
 public:
  using Error::Error;
};

}  // namespace corekg

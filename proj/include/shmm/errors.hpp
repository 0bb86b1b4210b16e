#pragma once

#include <stdexcept>
#include <string>

namespace shmm {

// Bad arguments, malformed inputs, broken invariants. CLI exit code 1.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

// File system and stream failures. CLI exit code 2.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace shmm

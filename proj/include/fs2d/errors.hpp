#pragma once

#include <stdexcept>
#include <string>

namespace fs2d {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: bad file contents, invalid configuration, violated
/// preconditions on user-supplied data.
class InputError : public Error {
 public:
  using Error::Error;
};

/// File could not be decoded. Carries the byte offset or line number where
/// decoding stopped.
class ParseError : public InputError {
 public:
  ParseError(const std::string& what, std::size_t location)
      : InputError(what), location_(location) {}
  std::size_t location() const { return location_; }

 private:
  std::size_t location_;
};

/// Two inputs that must agree in shape or geometry do not.
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// Rotation correlation profile is flat; the scans carry no usable structure.
class NoStructureError : public Error {
 public:
  using Error::Error;
};

}  // namespace fs2d

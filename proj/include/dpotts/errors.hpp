#pragma once

#include <stdexcept>
#include <string>

namespace dpotts {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Geometry.
class DegeneratePosition : public Error {
 public:
  using Error::Error;
};
class OutsideHull : public Error {
 public:
  using Error::Error;
};
class FrameVertexRemoval : public Error {
 public:
  using Error::Error;
};

// Model.
class WrongArgumentKind : public Error {
 public:
  using Error::Error;
};
class ScaleViolation : public Error {
 public:
  using Error::Error;
};

// Oracle.
class TooLarge : public Error {
 public:
  using Error::Error;
};

// Raised by audits when a bound that must always hold is violated.
class ViolationFound : public Error {
 public:
  using Error::Error;
};

// Invalid user configuration (CLI exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Unreadable input or unwritable output (CLI exit code 3).
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace dpotts

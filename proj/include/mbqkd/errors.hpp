#pragma once

#include <stdexcept>
#include <string>

namespace mbqkd {

// Precondition on a physical object failed (non-normalized state, non-unitary matrix).
class ContractViolation : public std::invalid_argument {
 public:
  explicit ContractViolation(const std::string& what) : std::invalid_argument(what) {}
};

// Measurement requested on a configuration the device cannot handle.
class UnsupportedMeasurement : public std::runtime_error {
 public:
  explicit UnsupportedMeasurement(const std::string& what) : std::runtime_error(what) {}
};

// A detection pattern outside the four discriminator classes. Unreachable from
// protocol states; seeing one means the optics model is broken.
class ClassificationError : public std::logic_error {
 public:
  explicit ClassificationError(const std::string& what) : std::logic_error(what) {}
};

// Bad user-supplied parameter (presence outside [0,1], priors, ranges).
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace mbqkd

#pragma once

#include <stdexcept>
#include <string>

namespace macfcs {

// Base for every error raised by the library. Callers that only care about
// "something was invalid" can catch this; the CLI maps it to exit status 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class UnknownVariable : public Error {
 public:
  explicit UnknownVariable(const std::string& name)
      : Error("unknown variable '" + name + "'") {}
};

class SingularCovariance : public Error {
 public:
  using Error::Error;
};

class OverlappingSets : public Error {
 public:
  using Error::Error;
};

class SelfLink : public Error {
 public:
  using Error::Error;
};

class InvalidPMF : public Error {
 public:
  using Error::Error;
};

class SplitOutOfBudget : public Error {
 public:
  using Error::Error;
};

class NonpositiveCompressionNoise : public Error {
 public:
  using Error::Error;
};

class BadPhaseStructure : public Error {
 public:
  using Error::Error;
};

class InvalidTolerance : public Error {
 public:
  using Error::Error;
};

// Raised by power minimization when no feasible point exists at the cap.
class CapExceeded : public Error {
 public:
  using Error::Error;
};

}  // namespace macfcs

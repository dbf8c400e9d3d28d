#pragma once

#include <stdexcept>
#include <string>

namespace deltatrain {

// Base class for all library failures.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid construction parameters or run configuration.
struct ConfigError : Error {
  using Error::Error;
};

// A kernel or user callback produced a non-finite value.
struct EvaluationError : Error {
  using Error::Error;
};

// An iterative numerical routine stopped short of its accuracy target.
// Carries the error estimate it did achieve.
class AccuracyError : public Error {
public:
  AccuracyError(const std::string& what, double achieved)
      : Error(what), achieved_(achieved) {}

  double achieved() const { return achieved_; }

private:
  double achieved_;
};

// A physically impossible value was encountered (e.g. a transfer-function
// modulus beyond 1 outside the numerical guard band).
struct PhysicalityError : Error {
  using Error::Error;
};

// Nearly repeated roots where simple poles are required.
struct DegeneracyError : Error {
  using Error::Error;
};

}  // namespace deltatrain

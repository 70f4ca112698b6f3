#pragma once

#include <stdexcept>
#include <string>

namespace selmerlab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// Enumeration would exceed the configured work budget.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

/// A p-adic computation could not be resolved at the current precision.
class UnstablePrecision : public Error {
 public:
  using Error::Error;
};

/// Adaptive precision escalation hit its configured maximum.
class PrecisionCeiling : public Error {
 public:
  using Error::Error;
};

class RejectionBudgetExceeded : public Error {
 public:
  using Error::Error;
};

class DegenerateCalibration : public Error {
 public:
  using Error::Error;
};

/// A log-log fit was asked to use a point with no successes.
class AllZeroSeries : public Error {
 public:
  using Error::Error;
};

class InvalidSpec : public Error {
 public:
  using Error::Error;
};

}  // namespace selmerlab

namespace selmerlab {

/// A run finished but a declared expectation was not met.
class OracleMismatch : public Error {
 public:
  using Error::Error;
};

}  // namespace selmerlab

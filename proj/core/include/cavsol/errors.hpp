#pragma once

#include <stdexcept>
#include <string>

namespace cavsol {

// Base of every error raised by the library. The tool maps the three
// families below onto process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad arguments or inconsistent shapes.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class OrderOverflow : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class ShapeMismatch : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class SingularCarrier : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class DegenerateField : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class TooShort : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class TruncationWeight : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

// Raised while integrating: the run left the regime where its results mean
// anything.
class NumericalAlarm : public Error {
 public:
  using Error::Error;
};

class HpViolation : public NumericalAlarm {
 public:
  using NumericalAlarm::NumericalAlarm;
};

class ConservationDrift : public NumericalAlarm {
 public:
  using NumericalAlarm::NumericalAlarm;
};

class NonFinite : public NumericalAlarm {
 public:
  using NumericalAlarm::NumericalAlarm;
};

class NonConvergence : public NumericalAlarm {
 public:
  using NumericalAlarm::NumericalAlarm;
};

// Exact quantum problem too large for the dense/Krylov reference path.
class DimensionOverflow : public Error {
 public:
  using Error::Error;
};

}  // namespace cavsol

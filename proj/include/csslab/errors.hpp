#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace csslab {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller passed a value outside an operation's contract.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Special-function argument outside its mathematical domain.
class DomainError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// MRC weights undefined because every branch SNR is zero.
class DegenerateWeights : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// Proposed decision requested before the history window is full.
class WarmupIncomplete : public Error {
 public:
  using Error::Error;
};

class InvariantViolation : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// Quadrature or series failed to reach its tolerance.
class NumericError : public Error {
 public:
  using Error::Error;
};

using WarningSink = std::function<void(std::string_view)>;

/// Replaces the process-wide warning sink (default: stderr). Pass an empty
/// function to silence warnings. Not thread-safe; call during startup.
void set_warning_sink(WarningSink sink);
void warn(std::string_view message);

}  // namespace csslab

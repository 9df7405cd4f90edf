#pragma once

#include <stdexcept>
#include <string>

namespace nrs {

enum class ErrorCode {
  FileNotFound,
  CorruptHeader,
  UnsupportedFormat,
  UnsupportedBitDepth,
  Unwritable,
  DimensionMismatch,
  OutOfBounds,
  InvalidArgument,
  EmptyMask,
  EmptyInput,
};

const char* to_string(ErrorCode code);

/// Error caused by bad input (files, arguments, shapes). The CLI maps it to exit code 1.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// An internal invariant did not hold. The CLI maps it to exit code 2.
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

#define NRS_ENSURE(cond, msg)                                         \
  do {                                                                \
    if (!(cond)) throw ::nrs::InvariantError(std::string(__FILE__) + \
                                             ":" + std::to_string(__LINE__) + ": " + (msg)); \
  } while (0)

}  // namespace nrs

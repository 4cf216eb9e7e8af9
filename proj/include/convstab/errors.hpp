#pragma once

#include <stdexcept>
#include <string>

namespace convstab {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or out-of-contract input (wrong lengths, NaN values, missing
// elements, empty sequences where one is required).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Index arithmetic left the signed 64-bit range.
class OverflowError : public Error {
 public:
  using Error::Error;
};

// A search or enumeration would exceed its configured work budget.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

namespace detail {

[[noreturn]] inline void fail_invalid(const std::string& what) { throw InvalidArgument(what); }
[[noreturn]] inline void fail_overflow(const std::string& what) { throw OverflowError(what); }
[[noreturn]] inline void fail_budget(const std::string& what) { throw BudgetExceeded(what); }

}  // namespace detail
}  // namespace convstab

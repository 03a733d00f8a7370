#pragma once

#include <stdexcept>
#include <string>

namespace flatflow {

// Error categories mirrored by the C API status codes.
enum class ErrorCode {
  Validation = 2,
  Budget = 3,
  Usage = 64,
  Horizon = 10,
  NotFound = 11,
  NotComparable = 12,
  InvalidArgument = 13,
  Internal = 99,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

struct ValidationError : Error {
  explicit ValidationError(const std::string& msg) : Error(ErrorCode::Validation, msg) {}
};

struct BudgetError : Error {
  explicit BudgetError(const std::string& msg) : Error(ErrorCode::Budget, msg) {}
};

struct UsageError : Error {
  explicit UsageError(const std::string& msg) : Error(ErrorCode::Usage, msg) {}
};

// Requested value depends on data beyond the traced window.
struct HorizonError : Error {
  explicit HorizonError(const std::string& msg) : Error(ErrorCode::Horizon, msg) {}
};

struct NotFoundError : Error {
  explicit NotFoundError(const std::string& msg) : Error(ErrorCode::NotFound, msg) {}
};

// The single-lift corridor estimate does not apply to this pair of paths.
struct NotComparableError : Error {
  explicit NotComparableError(const std::string& msg) : Error(ErrorCode::NotComparable, msg) {}
};

struct InvalidArgumentError : Error {
  explicit InvalidArgumentError(const std::string& msg) : Error(ErrorCode::InvalidArgument, msg) {}
};

}  // namespace flatflow

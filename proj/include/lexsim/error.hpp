#pragma once

#include <stdexcept>
#include <string>

namespace lexsim {

enum class ErrorCode {
  InvalidArgument,
  NegativeValue,
  TimestampOrder,
  DuplicateId,
  UnknownChain,
  EmptyAddress,
  FileMissing,
  SchemaMismatch,
  RowRejected,
  DuplicateKey,
  NonPositivePrice,
  MissingPrice,
  InvalidProfile,
  NegativeBalance,
  OutOfRange,
  InsufficientHistory,
  EmptyCompetingSet,
  EmptyRoute,
  GridTooLarge,
  IoFailure,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace lexsim

#pragma once

#include <stdexcept>
#include <string>

namespace radpipe {

// Error categories map to CLI exit codes: config/input validation problems
// exit with 1, runtime failures with 2.
enum class ErrorCode {
  InvalidConfig,
  MissingFile,
  MalformedHeader,
  SizeMismatch,
  BadArgument,
  SingleClass,
  Io,
  Internal,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const { return code_; }

  bool is_validation() const {
    return code_ == ErrorCode::InvalidConfig || code_ == ErrorCode::MissingFile ||
           code_ == ErrorCode::BadArgument;
  }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& msg) {
  throw Error(code, msg);
}

}  // namespace radpipe

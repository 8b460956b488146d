#pragma once

#include <stdexcept>
#include <string>

namespace popnet {

enum class ErrorCode {
  kDomain,
  kParse,
  kConsistency,
  kGenerationStalled,
  kParamMismatch,
  kInsufficientSupport,
  kEmptySupport,
  kDegenerateMarginal,
  kConfig,
  kIo,
};

const char* error_code_name(ErrorCode code);

class SimError : public std::runtime_error {
 public:
  SimError(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw SimError(code, message);
}

}  // namespace popnet

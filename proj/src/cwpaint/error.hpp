#pragma once

#include <stdexcept>
#include <string>

namespace cwpaint {

enum class ErrorCode {
  invalid_argument,
  size_cap,
  unsupported,
  numerical,
  io,
  step_cap,
};

/// Every failure inside the core is reported as an Error; the C boundary
/// translates the code into a status value.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace cwpaint

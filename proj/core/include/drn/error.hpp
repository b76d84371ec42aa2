#pragma once

#include <stdexcept>
#include <string>

namespace drn {

enum class ErrorCode {
  shape_mismatch,
  dtype_mismatch,
  invalid_argument,
  invalid_config,
  misuse,
  io,
  bad_magic,
  version_mismatch,
  truncated,
  unsupported_depth,
  empty_dataset,
  non_finite,
};

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

}  // namespace drn

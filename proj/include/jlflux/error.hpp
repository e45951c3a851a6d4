#pragma once

#include <stdexcept>
#include <string>

namespace jlflux {

enum class ErrorKind {
  Validation,  // bad inputs or violated preconditions
  Numerical,   // a computation failed or produced an inconsistent result
};

// All library failures are reported through this type. `code` is a
// module-qualified identifier such as "params.n_too_small" so callers can
// branch on it without parsing the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string code, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& code() const noexcept { return code_; }

 private:
  ErrorKind kind_;
  std::string code_;
};

[[noreturn]] void fail_validation(std::string code, const std::string& message);
[[noreturn]] void fail_numerical(std::string code, const std::string& message);

}  // namespace jlflux

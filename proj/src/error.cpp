#include "jlflux/error.hpp"

#include <utility>

namespace jlflux {

Error::Error(ErrorKind kind, std::string code, const std::string& message)
    : std::runtime_error(code + ": " + message), kind_(kind), code_(std::move(code)) {}

void fail_validation(std::string code, const std::string& message) {
  throw Error(ErrorKind::Validation, std::move(code), message);
}

void fail_numerical(std::string code, const std::string& message) {
  throw Error(ErrorKind::Numerical, std::move(code), message);
}

}  // namespace jlflux

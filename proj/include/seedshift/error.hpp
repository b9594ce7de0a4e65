#pragma once

#include <stdexcept>
#include <string>

namespace seedshift {

// Error kinds map one-to-one onto CLI exit codes and C API status codes.
enum class ErrorKind {
  kInvalidArgument = 2,
  kCorruptInput = 3,
  kNumericalFailure = 4,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline Error invalid_argument(const std::string& what) {
  return Error(ErrorKind::kInvalidArgument, what);
}

inline Error corrupt_input(const std::string& what) {
  return Error(ErrorKind::kCorruptInput, what);
}

inline Error numerical_failure(const std::string& what) {
  return Error(ErrorKind::kNumericalFailure, what);
}

}  // namespace seedshift

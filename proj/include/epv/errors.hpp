#pragma once

#include <stdexcept>
#include <string>

namespace epv {

// Input that violates a documented contract. `code` is a stable,
// machine-readable token (e.g. "all-missing-blocked") shared by the CLI
// and the HTTP service.
class ValidationError : public std::runtime_error {
 public:
  ValidationError(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

// Raised when an internal consistency check fails (a bug, not bad input).
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace epv

#pragma once

#include <stdexcept>
#include <string>

namespace fkf {

enum class ErrorCode {
  invalid_input,
  invalid_model,
  not_positive_semidefinite,
  factorization_failure,
  singular_innovation_cov,
};

const char* to_string(ErrorCode code) noexcept;

// Contract violations and unrecoverable factorization problems. Numerical
// divergence inside a running filter is not an error; see FilterState::failure.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace fkf

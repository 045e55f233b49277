#include "fkf/errors.hpp"

namespace fkf {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_input: return "invalid input";
    case ErrorCode::invalid_model: return "invalid model";
    case ErrorCode::not_positive_semidefinite: return "not positive semidefinite";
    case ErrorCode::factorization_failure: return "factorization failure";
    case ErrorCode::singular_innovation_cov: return "singular innovation covariance";
  }
  return "unknown error";
}

}  // namespace fkf

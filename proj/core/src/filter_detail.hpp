#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <type_traits>
#include <variant>
#include <string>

#include <Eigen/Core>

#include "fkf/errors.hpp"
#include "fkf/filters.hpp"

namespace fkf::detail {

// Smallest positive normal double; diagonal entries below it cannot be
// inverted without overflow.
inline constexpr double kInvFloor = std::numeric_limits<double>::min();

inline std::optional<FailureCause> nonfinite_cause(const Eigen::Ref<const Eigen::MatrixXd>& m) {
  if (m.allFinite()) return std::nullopt;
  return m.array().isInf().any() ? FailureCause::inf : FailureCause::nan;
}

inline FilterState failed(FilterState state, FailureCause cause, int step) {
  state.failure = Failure{cause, step};
  return state;
}

inline StepResult failed(StepResult result, FailureCause cause, int step) {
  result.state.failure = Failure{cause, step};
  return result;
}

// Marks the state failed if the estimate or covariance factors went
// non-finite; Inf takes precedence over NaN.
inline void check_state(FilterState& state) {
  if (state.failure) return;
  bool has_inf = false;
  bool has_nan = false;
  auto scan = [&](const Eigen::Ref<const Eigen::MatrixXd>& m) {
    if (m.allFinite()) return;
    if (m.array().isInf().any()) has_inf = true;
    if (m.array().isNaN().any()) has_nan = true;
  };
  scan(state.x_hat);
  std::visit([&](const auto& c) {
    using T = std::decay_t<decltype(c)>;
    if constexpr (std::is_same_v<T, FullCov>) {
      scan(c.p);
    } else if constexpr (std::is_same_v<T, CholCov>) {
      scan(c.s);
    } else if constexpr (std::is_same_v<T, UdCov>) {
      scan(c.u);
      scan(c.d);
    } else {
      scan(c.q);
      scan(c.d_sqrt);
    }
  }, state.cov);
  if (has_inf) {
    state.failure = Failure{FailureCause::inf, state.k};
  } else if (has_nan) {
    state.failure = Failure{FailureCause::nan, state.k};
  }
}

inline double loglik_increment(const InnovationTerms& t, Eigen::Index m) {
  return -0.5 * (static_cast<double>(m) * std::log(2.0 * std::numbers::pi) + t.log_det +
                 t.quadratic);
}

// Non-throwing variant for per-step reports.
inline double conventional_increment(const Eigen::MatrixXd& innovation_cov,
                                     const Eigen::VectorXd& innovation) {
  try {
    return loglik_increment(conventional_terms(innovation_cov, innovation),
                            innovation.size());
  } catch (const Error&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

template <typename Cov>
const Cov& expect_cov(const FilterState& state, const char* who) {
  const Cov* c = std::get_if<Cov>(&state.cov);
  if (c == nullptr) {
    throw Error(ErrorCode::invalid_input,
                std::string(who) + ": filter state holds the wrong covariance representation");
  }
  return *c;
}

inline void check_sizes(const FilterState& state, const StepMatrices& s,
                        const Eigen::Ref<const Eigen::VectorXd>* u,
                        const Eigen::Ref<const Eigen::VectorXd>* z, const char* who) {
  if (state.x_hat.size() != s.f.rows()) {
    throw Error(ErrorCode::invalid_input, std::string(who) + ": state dimension mismatch");
  }
  if (u != nullptr && u->size() != s.b.cols()) {
    throw Error(ErrorCode::invalid_input, std::string(who) + ": control dimension mismatch");
  }
  if (z != nullptr && z->size() != s.h.rows()) {
    throw Error(ErrorCode::invalid_input, std::string(who) + ": measurement dimension mismatch");
  }
}

}  // namespace fkf::detail

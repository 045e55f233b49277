#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "fkf/filters.hpp"

namespace fkf {

inline constexpr double kMreZeroFloor = 1e-6;

struct ErrorReport {
  Eigen::VectorXd rmse;
  std::vector<std::optional<double>> mre_percent;  // empty where the exact value is ~0
  double rmse_norm = 0.0;
  std::optional<Failure> failure;

  bool failed() const { return failure.has_value(); }
};

/// Per-component root mean square error over runs and steps. `truth[j]` and
/// `estimates[j]` are the K x n state histories of run j.
Eigen::VectorXd rmse(std::span<const Eigen::MatrixXd> truth,
                     std::span<const Eigen::MatrixXd> estimates);

/// Per-component mean relative error in percent at the final step. Rows of
/// `truth` and `estimates` are runs. Components whose mean |truth| falls below
/// `zero_floor` are absent.
std::vector<std::optional<double>> mre(const Eigen::Ref<const Eigen::MatrixXd>& truth,
                                       const Eigen::Ref<const Eigen::MatrixXd>& estimates,
                                       double zero_floor = kMreZeroFloor);

double rmse_norm(const Eigen::Ref<const Eigen::VectorXd>& rmse);

}  // namespace fkf

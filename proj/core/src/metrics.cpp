#include "fkf/metrics.hpp"

#include <cmath>

#include "fkf/errors.hpp"

namespace fkf {

Eigen::VectorXd rmse(std::span<const Eigen::MatrixXd> truth,
                     std::span<const Eigen::MatrixXd> estimates) {
  if (truth.empty() || truth.size() != estimates.size()) {
    throw Error(ErrorCode::invalid_input, "rmse: need the same number (>= 1) of runs");
  }
  const Eigen::Index steps = truth.front().rows();
  const Eigen::Index n = truth.front().cols();
  if (steps == 0) throw Error(ErrorCode::invalid_input, "rmse: need at least one step");

  Eigen::VectorXd sum = Eigen::VectorXd::Zero(n);
  for (std::size_t j = 0; j < truth.size(); ++j) {
    if (truth[j].rows() != steps || truth[j].cols() != n ||
        estimates[j].rows() != steps || estimates[j].cols() != n) {
      throw Error(ErrorCode::invalid_input, "rmse: shape mismatch");
    }
    sum += (truth[j] - estimates[j]).array().square().matrix().colwise().sum().transpose();
  }
  const double count = static_cast<double>(truth.size()) * static_cast<double>(steps);
  return (sum / count).cwiseSqrt();
}

std::vector<std::optional<double>> mre(const Eigen::Ref<const Eigen::MatrixXd>& truth,
                                       const Eigen::Ref<const Eigen::MatrixXd>& estimates,
                                       double zero_floor) {
  if (truth.rows() == 0 || truth.rows() != estimates.rows() ||
      truth.cols() != estimates.cols()) {
    throw Error(ErrorCode::invalid_input, "mre: shape mismatch");
  }
  const double runs = static_cast<double>(truth.rows());
  std::vector<std::optional<double>> out(static_cast<std::size_t>(truth.cols()));
  for (Eigen::Index i = 0; i < truth.cols(); ++i) {
    if (truth.col(i).cwiseAbs().sum() / runs < zero_floor) continue;
    const double total =
        ((truth.col(i) - estimates.col(i)).array().abs() / truth.col(i).array().abs()).sum();
    out[static_cast<std::size_t>(i)] = 100.0 * total / runs;
  }
  return out;
}

double rmse_norm(const Eigen::Ref<const Eigen::VectorXd>& rmse) {
  return std::sqrt(rmse.squaredNorm());
}

}  // namespace fkf

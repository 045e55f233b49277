#include <utility>

#include <Eigen/LU>

#include "fkf/errors.hpp"
#include "fkf/filters.hpp"

namespace fkf {

NoiseFactors factor_noise(const Eigen::MatrixXd& theta, const Eigen::MatrixXd& r) {
  NoiseFactors out;
  try {
    out.theta_chol = arrays::cholesky_upper(theta);
  } catch (const Error&) {
    // left empty; filters that need it report factorization_failure
  }
  out.theta_svd = arrays::psd_svd(theta);
  out.theta_ud = arrays::ud_factorize(theta);

  try {
    Eigen::MatrixXd chol = arrays::cholesky_upper(r);
    if ((chol.diagonal().array() > 0.0).all()) {
      const Eigen::Index m = r.rows();
      Eigen::MatrixXd inv_t = chol.transpose().triangularView<Eigen::Lower>().solve(
          Eigen::MatrixXd::Identity(m, m));
      out.r_inv = inv_t.transpose() * inv_t;
      out.r_chol_inv_t = std::move(inv_t);
    }
    out.r_chol = std::move(chol);
  } catch (const Error&) {
  }
  out.r_svd = arrays::psd_svd(r);
  return out;
}

FilterModel::FilterModel(StateSpaceModel model, FilterOptions options)
    : model_(std::move(model)), options_(options) {
  model_.validate();
  base_ = factor_noise(model_.theta, model_.r);
  for (const auto& [k, o] : model_.overrides) {
    if (o.theta || o.r) {
      const StepMatrices s = model_.at(k);
      per_step_.emplace(k, factor_noise(s.theta, s.r));
    }
  }
}

const NoiseFactors& FilterModel::noise(int k) const {
  const auto it = per_step_.find(k);
  return it == per_step_.end() ? base_ : it->second;
}

}  // namespace fkf

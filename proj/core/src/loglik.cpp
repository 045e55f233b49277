#include <cmath>

#include <Eigen/Cholesky>

#include "filter_detail.hpp"

namespace fkf {

InnovationTerms conventional_terms(const Eigen::Ref<const Eigen::MatrixXd>& innovation_cov,
                                   const Eigen::Ref<const Eigen::VectorXd>& innovation) {
  if (innovation_cov.rows() != innovation_cov.cols() ||
      innovation_cov.rows() != innovation.size()) {
    throw Error(ErrorCode::invalid_input, "conventional_terms: dimension mismatch");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(innovation_cov);
  if (llt.info() != Eigen::Success || !innovation_cov.allFinite()) {
    throw Error(ErrorCode::singular_innovation_cov,
                "conventional_terms: innovation covariance is not positive definite");
  }
  const Eigen::MatrixXd l = llt.matrixL();
  if ((l.diagonal().array() <= 0.0).any()) {
    throw Error(ErrorCode::singular_innovation_cov,
                "conventional_terms: innovation covariance is singular");
  }
  InnovationTerms t;
  t.log_det = 2.0 * l.diagonal().array().log().sum();
  t.quadratic = l.triangularView<Eigen::Lower>().solve(innovation).squaredNorm();
  return t;
}

InnovationTerms svd_terms(const Eigen::Ref<const Eigen::VectorXd>& d_sqrt,
                          const Eigen::Ref<const Eigen::VectorXd>& normalized_innovation) {
  if (d_sqrt.size() != normalized_innovation.size()) {
    throw Error(ErrorCode::invalid_input, "svd_terms: dimension mismatch");
  }
  const Eigen::ArrayXd d = d_sqrt.array().square();
  InnovationTerms t;
  t.log_det = d.log().sum();
  t.quadratic = (normalized_innovation.array().square() / d).sum();
  return t;
}

double loglik_conventional(std::span<const StepReport> reports) {
  double total = 0.0;
  for (const StepReport& r : reports) {
    const Eigen::MatrixXd re = reconstruct_covariance(r.innovation_cov);
    total += detail::loglik_increment(conventional_terms(re, r.innovation), r.innovation.size());
  }
  return total;
}

double loglik_svd(std::span<const StepReport> reports) {
  double total = 0.0;
  for (const StepReport& r : reports) {
    const SvdCov* re = std::get_if<SvdCov>(&r.innovation_cov);
    if (re == nullptr || r.normalized_innovation.size() != re->d_sqrt.size()) {
      throw Error(ErrorCode::invalid_input,
                  "loglik_svd: reports must carry SVD innovation factors");
    }
    total += detail::loglik_increment(svd_terms(re->d_sqrt, r.normalized_innovation),
                                      r.normalized_innovation.size());
  }
  return total;
}

}  // namespace fkf

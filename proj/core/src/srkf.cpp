#include "filter_detail.hpp"

namespace fkf {

// Time update:  [S F^T; Theta^{1/2} G^T]  --QR-->  S_{k|k-1}
// Measurement:  [R^{1/2}   0 ]           [Re^{1/2}  Kbar^T ]
//               [S H^T     S ]  --QR-->  [0         S_{k|k}]
// with S^T S = P and Kbar = P H^T Re^{-1/2}.
StepResult srkf_step(const FilterState& state, const FilterModel& model,
                     const Eigen::Ref<const Eigen::VectorXd>& u,
                     const Eigen::Ref<const Eigen::VectorXd>& z) {
  StepResult out{state, {}};
  if (state.failed()) return out;
  const int k = state.k + 1;
  const StepMatrices s = model.at(k);
  detail::check_sizes(state, s, &u, &z, "srkf_step");
  const Eigen::MatrixXd& sp = detail::expect_cov<CholCov>(state, "srkf_step").s;
  const NoiseFactors& noise = model.noise(k);
  out.state.k = k;

  if (!noise.theta_chol || !noise.r_chol) {
    return detail::failed(std::move(out), FailureCause::factorization_failure, k);
  }
  const Eigen::Index n = sp.rows();
  const Eigen::Index p = s.theta.rows();
  const Eigen::Index m = s.h.rows();

  Eigen::MatrixXd tu(n + p, n);
  tu << sp * s.f.transpose(), *noise.theta_chol * s.g.transpose();
  if (auto bad = detail::nonfinite_cause(tu)) {
    return detail::failed(std::move(out), *bad, k);
  }
  const Eigen::MatrixXd s_prior = arrays::qr_triangularize(tu);
  const Eigen::VectorXd x_prior = s.f * state.x_hat + s.b * u;

  Eigen::MatrixXd mu = Eigen::MatrixXd::Zero(m + n, m + n);
  mu.topLeftCorner(m, m) = *noise.r_chol;
  mu.bottomLeftCorner(n, m) = s_prior * s.h.transpose();
  mu.bottomRightCorner(n, n) = s_prior;
  if (auto bad = detail::nonfinite_cause(mu)) {
    return detail::failed(std::move(out), *bad, k);
  }
  const Eigen::MatrixXd post = arrays::qr_triangularize(mu);
  const Eigen::MatrixXd re_sqrt = post.topLeftCorner(m, m);
  const Eigen::MatrixXd kbar_t = post.topRightCorner(m, n);

  const Eigen::VectorXd e = z - s.h * x_prior;
  out.report.innovation = e;
  out.report.innovation_cov = CholCov{re_sqrt};
  if ((re_sqrt.diagonal().array() == 0.0).any()) {
    return detail::failed(std::move(out), FailureCause::singular_innovation_cov, k);
  }

  // Re^{-T/2} e, and K = Kbar Re^{-T/2}.
  const Eigen::VectorXd e_white =
      re_sqrt.transpose().triangularView<Eigen::Lower>().solve(e);
  const Eigen::MatrixXd gain =
      re_sqrt.triangularView<Eigen::Upper>().solve(kbar_t).transpose();

  out.state.x_hat = x_prior + kbar_t.transpose() * e_white;
  out.state.cov = CholCov{post.bottomRightCorner(n, n)};
  out.state.tag = EstimateTag::a_posteriori;
  out.report.gain = gain;
  out.report.loglik_increment = detail::loglik_increment(
      {2.0 * re_sqrt.diagonal().array().abs().log().sum(), e_white.squaredNorm()}, m);
  detail::check_state(out.state);
  return out;
}

}  // namespace fkf

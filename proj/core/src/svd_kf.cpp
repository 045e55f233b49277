#include "filter_detail.hpp"

namespace fkf {
namespace {

// Square root N of a noise covariance with N^T N = C, as chosen by options.
std::optional<Eigen::MatrixXd> noise_root(NoiseRoot form, const arrays::SvdFactors& svd,
                                          const std::optional<Eigen::MatrixXd>& chol) {
  if (form == NoiseRoot::cholesky) return chol;
  return Eigen::MatrixXd(svd.d_sqrt.asDiagonal() * svd.q.transpose());
}

}  // namespace

// [D^{1/2} Q^T F^T; N_Theta G^T] = W [D_-^{1/2}; 0] Q_-^T
FilterState svdkf_time_update(const FilterState& state, const FilterModel& model,
                              const Eigen::Ref<const Eigen::VectorXd>& u) {
  if (state.failed()) return state;
  const int k = state.k + 1;
  const StepMatrices s = model.at(k);
  detail::check_sizes(state, s, &u, nullptr, "svdkf_time_update");
  const SvdCov& cov = detail::expect_cov<SvdCov>(state, "svdkf_time_update");
  const NoiseFactors& noise = model.noise(k);

  FilterState next = state;
  next.k = k;
  next.tag = EstimateTag::a_priori;
  const auto theta_root =
      noise_root(model.options().svd_kf_noise_root, noise.theta_svd, noise.theta_chol);
  if (!theta_root) return detail::failed(std::move(next), FailureCause::factorization_failure, k);

  const Eigen::Index n = cov.q.rows();
  Eigen::MatrixXd pre(n + theta_root->rows(), n);
  pre << cov.d_sqrt.asDiagonal() * cov.q.transpose() * s.f.transpose(),
      *theta_root * s.g.transpose();
  if (auto bad = detail::nonfinite_cause(pre)) {
    return detail::failed(std::move(next), *bad, k);
  }
  arrays::SvdRightFactors f = arrays::svd_array_right(pre);
  next.x_hat = s.f * state.x_hat + s.b * u;
  next.cov = SvdCov{std::move(f.v), std::move(f.singular_values)};
  detail::check_state(next);
  return next;
}

// (i)   [N_R; D^{1/2} Q^T H^T]                  = W [D_Re^{1/2}; 0] Q_Re^T
// (ii)  Kbar = P H^T Q_Re,  K = Kbar D_Re^{-1} Q_Re^T
// (iii) [D^{1/2} Q^T (I - K H)^T; N_R K^T]     = W [D_+^{1/2}; 0] Q_+^T
// (iv)  ebar = Q_Re^T e,  x_+ = x + Kbar D_Re^{-1} ebar
StepResult svdkf_measurement_update(const FilterState& state, const FilterModel& model,
                                    const Eigen::Ref<const Eigen::VectorXd>& z) {
  StepResult out{state, {}};
  if (state.failed()) return out;
  const int k = state.k;
  const StepMatrices s = model.at(k);
  detail::check_sizes(state, s, nullptr, &z, "svdkf_measurement_update");
  const SvdCov& cov = detail::expect_cov<SvdCov>(state, "svdkf_measurement_update");
  const NoiseFactors& noise = model.noise(k);

  const auto r_root = noise_root(model.options().svd_kf_noise_root, noise.r_svd, noise.r_chol);
  if (!r_root) return detail::failed(std::move(out), FailureCause::factorization_failure, k);

  const Eigen::Index n = cov.q.rows();
  const Eigen::Index m = s.h.rows();
  const Eigen::MatrixXd dq_t = cov.d_sqrt.asDiagonal() * cov.q.transpose();  // D^{1/2} Q^T

  Eigen::MatrixXd pre_re(m + n, m);
  pre_re << *r_root, dq_t * s.h.transpose();
  if (auto bad = detail::nonfinite_cause(pre_re)) {
    return detail::failed(std::move(out), *bad, k);
  }
  const arrays::SvdRightFactors re = arrays::svd_array_right(pre_re);
  const Eigen::MatrixXd& q_re = re.v;
  const Eigen::VectorXd d_re = re.singular_values.array().square().matrix();

  const Eigen::VectorXd e = z - s.h * state.x_hat;
  const Eigen::VectorXd e_bar = q_re.transpose() * e;
  out.report.innovation = e;
  out.report.normalized_innovation = e_bar;
  out.report.innovation_cov = SvdCov{q_re, re.singular_values};
  if ((d_re.array() < detail::kInvFloor).any()) {
    return detail::failed(std::move(out), FailureCause::singular_innovation_cov, k);
  }

  // P H^T Q_Re = (D^{1/2} Q^T)^T (D^{1/2} Q^T H^T Q_Re)
  const Eigen::MatrixXd kbar = dq_t.transpose() * (dq_t * s.h.transpose() * q_re);
  const Eigen::VectorXd d_re_inv = d_re.cwiseInverse();
  const Eigen::MatrixXd gain = kbar * d_re_inv.asDiagonal() * q_re.transpose();

  Eigen::MatrixXd pre_post(n + m, n);
  pre_post << dq_t * (Eigen::MatrixXd::Identity(n, n) - gain * s.h).transpose(),
      *r_root * gain.transpose();
  if (auto bad = detail::nonfinite_cause(pre_post)) {
    return detail::failed(std::move(out), *bad, k);
  }
  arrays::SvdRightFactors post = arrays::svd_array_right(pre_post);

  out.state.x_hat = state.x_hat + kbar * d_re_inv.cwiseProduct(e_bar);
  out.state.cov = SvdCov{std::move(post.v), std::move(post.singular_values)};
  out.state.tag = EstimateTag::a_posteriori;
  out.report.gain = gain;
  out.report.normalized_gain = kbar;
  out.report.loglik_increment = detail::loglik_increment(svd_terms(re.singular_values, e_bar), m);
  detail::check_state(out.state);
  return out;
}

}  // namespace fkf

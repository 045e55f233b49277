#include "filter_detail.hpp"

namespace fkf {
namespace {

// Reciprocal of a D_P^{1/2} diagonal; counted for the inversion audit.
std::optional<Eigen::VectorXd> invert_dp(const Eigen::VectorXd& d, std::uint64_t& counter) {
  if ((d.array() < detail::kInvFloor).any()) return std::nullopt;
  counter += static_cast<std::uint64_t>(d.size());
  return d.cwiseInverse();
}

}  // namespace

// Time update:  [D^{1/2} Q^T F^T; Theta^{1/2} G^T] = W [D_-^{1/2}; 0] V^T,  Q_- = V
// Measurement:  [R^{-T/2} H Q_-; D_-^{-1/2}]       = W [D_+^{-1/2}; 0] V^T, Q_+ = Q_- V
//               K = Q_+ D_+ Q_+^T H^T R^{-1}
StepResult svd_srkf_step(const FilterState& state, const FilterModel& model,
                         const Eigen::Ref<const Eigen::VectorXd>& u,
                         const Eigen::Ref<const Eigen::VectorXd>& z) {
  StepResult out{state, {}};
  if (state.failed()) return out;
  const int k = state.k + 1;
  const StepMatrices s = model.at(k);
  detail::check_sizes(state, s, &u, &z, "svd_srkf_step");
  const SvdCov& cov = detail::expect_cov<SvdCov>(state, "svd_srkf_step");
  const NoiseFactors& noise = model.noise(k);
  out.state.k = k;

  if (!noise.theta_chol || !noise.r_chol_inv_t || !noise.r_inv) {
    return detail::failed(std::move(out), FailureCause::factorization_failure, k);
  }
  const Eigen::Index n = cov.q.rows();
  const Eigen::Index p = s.theta.rows();
  const Eigen::Index m = s.h.rows();

  Eigen::MatrixXd tu(n + p, n);
  tu << cov.d_sqrt.asDiagonal() * cov.q.transpose() * s.f.transpose(),
      *noise.theta_chol * s.g.transpose();
  if (auto bad = detail::nonfinite_cause(tu)) {
    return detail::failed(std::move(out), *bad, k);
  }
  const arrays::SvdRightFactors prior = arrays::svd_array_right(tu);
  const Eigen::VectorXd x_prior = s.f * state.x_hat + s.b * u;

  const Eigen::VectorXd e = z - s.h * x_prior;
  const Eigen::MatrixXd p_prior =
      prior.v * prior.singular_values.array().square().matrix().asDiagonal() * prior.v.transpose();
  const Eigen::MatrixXd re = s.h * p_prior * s.h.transpose() + s.r;
  out.report.innovation = e;
  out.report.innovation_cov = FullCov{0.5 * (re + re.transpose())};  // diagnostic only

  const auto prior_inv = invert_dp(prior.singular_values, out.state.dp_reciprocals);
  if (!prior_inv) {
    return detail::failed(std::move(out), FailureCause::diagonal_inversion_underflow, k);
  }
  Eigen::MatrixXd mu(m + n, n);
  mu << *noise.r_chol_inv_t * s.h * prior.v, prior_inv->asDiagonal().toDenseMatrix();
  if (auto bad = detail::nonfinite_cause(mu)) {
    return detail::failed(std::move(out), *bad, k);
  }
  const arrays::SvdRightFactors post = arrays::svd_array_right(mu);
  const auto d_post = invert_dp(post.singular_values, out.state.dp_reciprocals);
  if (!d_post) {
    return detail::failed(std::move(out), FailureCause::diagonal_inversion_underflow, k);
  }
  const Eigen::MatrixXd q_post = prior.v * post.v;
  const Eigen::MatrixXd p_post =
      q_post * d_post->array().square().matrix().asDiagonal() * q_post.transpose();
  const Eigen::MatrixXd gain = p_post * s.h.transpose() * *noise.r_inv;

  out.state.x_hat = x_prior + gain * e;
  out.state.cov = SvdCov{q_post, *d_post};
  out.state.tag = EstimateTag::a_posteriori;
  out.report.gain = gain;
  out.report.loglik_increment = detail::conventional_increment(re, e);
  detail::check_state(out.state);
  return out;
}

}  // namespace fkf

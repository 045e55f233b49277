#include <Eigen/LU>

#include "filter_detail.hpp"

namespace fkf {

FilterState kf_time_update(const FilterState& state, const FilterModel& model,
                           const Eigen::Ref<const Eigen::VectorXd>& u) {
  if (state.failed()) return state;
  const int k = state.k + 1;
  const StepMatrices s = model.at(k);
  detail::check_sizes(state, s, &u, nullptr, "kf_time_update");
  const Eigen::MatrixXd& p = detail::expect_cov<FullCov>(state, "kf_time_update").p;

  FilterState next = state;
  next.k = k;
  next.tag = EstimateTag::a_priori;
  next.x_hat = s.f * state.x_hat + s.b * u;
  next.cov = FullCov{s.f * p * s.f.transpose() + s.g * s.theta * s.g.transpose()};
  detail::check_state(next);
  return next;
}

StepResult kf_measurement_update(const FilterState& state, const FilterModel& model,
                                 const Eigen::Ref<const Eigen::VectorXd>& z) {
  StepResult out{state, {}};
  if (state.failed()) return out;
  const int k = state.k;
  const StepMatrices s = model.at(k);
  detail::check_sizes(state, s, nullptr, &z, "kf_measurement_update");
  const Eigen::MatrixXd& p = detail::expect_cov<FullCov>(state, "kf_measurement_update").p;
  const Eigen::Index n = p.rows();

  const Eigen::MatrixXd re = s.h * p * s.h.transpose() + s.r;
  const Eigen::VectorXd e = z - s.h * state.x_hat;
  out.report.innovation = e;
  out.report.innovation_cov = FullCov{re};

  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(re);
  if ((lu.matrixLU().diagonal().array() == 0.0).any()) {
    return detail::failed(std::move(out), FailureCause::singular_innovation_cov, k);
  }
  const Eigen::MatrixXd gain = p * s.h.transpose() * lu.inverse();

  out.state.x_hat = state.x_hat + gain * e;
  // (I - K H) P without symmetrization.
  out.state.cov = FullCov{(Eigen::MatrixXd::Identity(n, n) - gain * s.h) * p};
  out.state.tag = EstimateTag::a_posteriori;
  out.report.gain = gain;
  out.report.loglik_increment = detail::conventional_increment(re, e);
  detail::check_state(out.state);
  return out;
}

}  // namespace fkf

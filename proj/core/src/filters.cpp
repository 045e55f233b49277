#include <utility>

#include "filter_detail.hpp"

namespace fkf {

FilterState initialize(FilterKind kind, const FilterModel& model) {
  const StateSpaceModel& m = model.model();
  FilterState state;
  state.x_hat = m.x0_mean;
  state.k = 0;
  state.tag = EstimateTag::a_posteriori;
  switch (kind) {
    case FilterKind::kf:
      state.cov = FullCov{m.pi0};
      break;
    case FilterKind::srkf:
      state.cov = CholCov{arrays::cholesky_upper(m.pi0)};
      break;
    case FilterKind::udkf: {
      arrays::UdPair ud = arrays::ud_factorize(m.pi0);
      state.cov = UdCov{std::move(ud.u), std::move(ud.d)};
      break;
    }
    case FilterKind::svd_srkf:
    case FilterKind::svd_kf: {
      arrays::SvdFactors f = arrays::psd_svd(m.pi0);
      state.cov = SvdCov{std::move(f.q), std::move(f.d_sqrt)};
      break;
    }
  }
  return state;
}

StepResult step(FilterKind kind, const FilterState& state, const FilterModel& model,
                const Eigen::Ref<const Eigen::VectorXd>& u,
                const Eigen::Ref<const Eigen::VectorXd>& z) {
  switch (kind) {
    case FilterKind::kf:
      return kf_measurement_update(kf_time_update(state, model, u), model, z);
    case FilterKind::srkf:
      return srkf_step(state, model, u, z);
    case FilterKind::udkf:
      return udkf_step(state, model, u, z);
    case FilterKind::svd_srkf:
      return svd_srkf_step(state, model, u, z);
    case FilterKind::svd_kf:
      return svdkf_measurement_update(svdkf_time_update(state, model, u), model, z);
  }
  throw Error(ErrorCode::invalid_input, "step: unknown filter kind");
}

}  // namespace fkf

#include "filter_detail.hpp"

namespace fkf {
namespace {

struct ScalarUpdate {
  double innovation;  // y - h x before the update
  double variance;    // h P h^T + r
};

// Bierman's scalar measurement update of (U, d, x) for y = h x + v, var(v) = r.
ScalarUpdate bierman_update(Eigen::MatrixXd& u, Eigen::VectorXd& d, Eigen::VectorXd& x,
                            const Eigen::Ref<const Eigen::RowVectorXd>& h, double y,
                            double r) {
  const Eigen::Index n = d.size();
  const Eigen::VectorXd f = u.transpose() * h.transpose();
  const Eigen::VectorXd v = d.cwiseProduct(f);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);

  double alpha = r;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double alpha_prev = alpha;
    alpha += f(j) * v(j);
    d(j) *= alpha_prev / alpha;
    const double lambda = -f(j) / alpha_prev;
    for (Eigen::Index i = 0; i < j; ++i) {
      const double u_old = u(i, j);
      u(i, j) = u_old + b(i) * lambda;
      b(i) += u_old * v(j);
    }
    b(j) = v(j);
  }

  const double innovation = y - h.dot(x);
  x += b * (innovation / alpha);
  return {innovation, alpha};
}

}  // namespace

// Time update via MWGS over [F U | G U_Theta] with weights diag(d, d_Theta);
// measurement update as m scalar Bierman updates of the R-whitened measurement.
StepResult udkf_step(const FilterState& state, const FilterModel& model,
                     const Eigen::Ref<const Eigen::VectorXd>& u,
                     const Eigen::Ref<const Eigen::VectorXd>& z) {
  StepResult out{state, {}};
  if (state.failed()) return out;
  const int k = state.k + 1;
  const StepMatrices s = model.at(k);
  detail::check_sizes(state, s, &u, &z, "udkf_step");
  const UdCov& ud = detail::expect_cov<UdCov>(state, "udkf_step");
  const NoiseFactors& noise = model.noise(k);
  out.state.k = k;

  if (!noise.r_chol_inv_t || !noise.r_chol) {
    return detail::failed(std::move(out), FailureCause::factorization_failure, k);
  }
  const Eigen::Index n = ud.u.rows();
  const Eigen::Index p = s.theta.rows();
  const Eigen::Index m = s.h.rows();

  Eigen::MatrixXd basis(n, n + p);
  basis << s.f * ud.u, s.g * noise.theta_ud.u;
  Eigen::VectorXd weights(n + p);
  weights << ud.d, noise.theta_ud.d;
  if (auto bad = detail::nonfinite_cause(basis)) {
    return detail::failed(std::move(out), *bad, k);
  }
  if (auto bad = detail::nonfinite_cause(weights)) {
    return detail::failed(std::move(out), *bad, k);
  }
  arrays::UdPair prior = arrays::mwgs(basis, weights);
  Eigen::VectorXd x = s.f * state.x_hat + s.b * u;

  const Eigen::MatrixXd p_prior = prior.u * prior.d.asDiagonal() * prior.u.transpose();
  const Eigen::MatrixXd re = s.h * p_prior * s.h.transpose() + s.r;
  out.report.innovation = z - s.h * x;
  out.report.innovation_cov = FullCov{0.5 * (re + re.transpose())};

  const Eigen::MatrixXd h_white = *noise.r_chol_inv_t * s.h;
  const Eigen::VectorXd z_white = *noise.r_chol_inv_t * z;
  InnovationTerms terms{2.0 * noise.r_chol->diagonal().array().log().sum(), 0.0};
  for (Eigen::Index i = 0; i < m; ++i) {
    const ScalarUpdate su = bierman_update(prior.u, prior.d, x, h_white.row(i), z_white(i), 1.0);
    terms.log_det += std::log(su.variance);
    terms.quadratic += su.innovation * su.innovation / su.variance;
  }

  out.state.x_hat = x;
  out.state.cov = UdCov{prior.u, prior.d};
  out.state.tag = EstimateTag::a_posteriori;
  if (noise.r_inv) {
    const Eigen::MatrixXd p_post = prior.u * prior.d.asDiagonal() * prior.u.transpose();
    out.report.gain = p_post * s.h.transpose() * *noise.r_inv;
  }
  out.report.loglik_increment = detail::loglik_increment(terms, m);
  detail::check_state(out.state);
  return out;
}

}  // namespace fkf

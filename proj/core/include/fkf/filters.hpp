#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "fkf/arrays.hpp"
#include "fkf/model.hpp"

namespace fkf {

enum class FilterKind { kf, srkf, udkf, svd_srkf, svd_kf };

inline constexpr FilterKind kAllFilters[] = {FilterKind::kf, FilterKind::srkf,
                                             FilterKind::udkf, FilterKind::svd_srkf,
                                             FilterKind::svd_kf};

/// "kf", "srkf", "udkf", "svd-srkf", "svd-kf".
std::string_view to_string(FilterKind kind) noexcept;
/// Accepts the names above; '_' is accepted in place of '-'.
std::optional<FilterKind> parse_filter_kind(std::string_view name) noexcept;

// ---------------------------------------------------------------------------
// Covariance representations

struct FullCov {
  Eigen::MatrixXd p;
};

// Upper-triangular S with P = S^T S.
struct CholCov {
  Eigen::MatrixXd s;
};

// P = U diag(d) U^T, U unit upper-triangular.
struct UdCov {
  Eigen::MatrixXd u;
  Eigen::VectorXd d;
};

// P = Q diag(d_sqrt)^2 Q^T.
struct SvdCov {
  Eigen::MatrixXd q;
  Eigen::VectorXd d_sqrt;
};

using CovarianceRepr = std::variant<FullCov, CholCov, UdCov, SvdCov>;

/// Reformed covariance, symmetrized as (M + M^T) / 2.
Eigen::MatrixXd reconstruct_covariance(const CovarianceRepr& cov);

bool all_finite(const CovarianceRepr& cov);

// ---------------------------------------------------------------------------
// Filter state

enum class EstimateTag { a_priori, a_posteriori };

enum class FailureCause {
  nan,
  inf,
  factorization_failure,
  singular_innovation_cov,
  diagonal_inversion_underflow,
};

std::string_view to_string(FailureCause cause) noexcept;

struct Failure {
  FailureCause cause;
  int step;
};

struct FilterState {
  Eigen::VectorXd x_hat;
  CovarianceRepr cov;
  int k = 0;
  EstimateTag tag = EstimateTag::a_posteriori;
  std::optional<Failure> failure;
  // Number of reciprocals taken of D_P^{1/2} entries. The SVD-SRKF needs two
  // per entry and step; the SVD-KF must never take any.
  std::uint64_t dp_reciprocals = 0;

  bool failed() const { return failure.has_value(); }
};

struct StepReport {
  Eigen::VectorXd innovation;             // e_k = z_k - H x_{k|k-1}
  Eigen::VectorXd normalized_innovation;  // Q_{Re}^T e_k (SVD-KF only)
  CovarianceRepr innovation_cov;          // R_{e,k}
  Eigen::MatrixXd gain;                   // K_k
  Eigen::MatrixXd normalized_gain;        // P H^T Q_{Re} (SVD-KF only)
  double loglik_increment = 0.0;
};

struct StepResult {
  FilterState state;
  StepReport report;
};

// ---------------------------------------------------------------------------
// Prepared model: the state-space model plus the noise-covariance factors each
// filter consumes, computed once for the constant matrices and once for every
// step carrying a Theta / R override. Immutable after construction.

struct NoiseFactors {
  std::optional<Eigen::MatrixXd> theta_chol;    // upper, S^T S = Theta
  arrays::SvdFactors theta_svd;
  arrays::UdPair theta_ud;
  std::optional<Eigen::MatrixXd> r_chol;        // upper, S^T S = R; empty if R is singular
  std::optional<Eigen::MatrixXd> r_chol_inv_t;  // R^{-T/2}
  std::optional<Eigen::MatrixXd> r_inv;
  arrays::SvdFactors r_svd;
};

// Which square roots of Theta and R the SVD-KF places in its pre-arrays.
enum class NoiseRoot {
  svd,       // D^{1/2} Q^T
  cholesky,  // upper Cholesky factor
};

struct FilterOptions {
  NoiseRoot svd_kf_noise_root = NoiseRoot::svd;
};

class FilterModel {
 public:
  explicit FilterModel(StateSpaceModel model, FilterOptions options = {});

  const StateSpaceModel& model() const { return model_; }
  const FilterOptions& options() const { return options_; }
  StepMatrices at(int k) const { return model_.at(k); }
  const NoiseFactors& noise(int k) const;

 private:
  StateSpaceModel model_;
  FilterOptions options_;
  NoiseFactors base_;
  std::map<int, NoiseFactors> per_step_;
};

NoiseFactors factor_noise(const Eigen::MatrixXd& theta, const Eigen::MatrixXd& r);

// ---------------------------------------------------------------------------
// Filters. Every operation is a pure transition; a state that has failed is
// returned unchanged. Steps process k = state.k + 1.

/// x_{0|0} = x0_mean with Pi0 in the representation `kind` propagates.
FilterState initialize(FilterKind kind, const FilterModel& model);

// Conventional filter.
FilterState kf_time_update(const FilterState& state, const FilterModel& model,
                           const Eigen::Ref<const Eigen::VectorXd>& u);
StepResult kf_measurement_update(const FilterState& state, const FilterModel& model,
                                 const Eigen::Ref<const Eigen::VectorXd>& z);

// Cholesky square-root array filter (QR-triangularized pre-arrays).
StepResult srkf_step(const FilterState& state, const FilterModel& model,
                     const Eigen::Ref<const Eigen::VectorXd>& u,
                     const Eigen::Ref<const Eigen::VectorXd>& z);

// UD filter: MWGS time update, Bierman scalar measurement updates.
StepResult udkf_step(const FilterState& state, const FilterModel& model,
                     const Eigen::Ref<const Eigen::VectorXd>& u,
                     const Eigen::Ref<const Eigen::VectorXd>& z);

// SVD filter with information-form measurement update; inverts D_P^{1/2}.
StepResult svd_srkf_step(const FilterState& state, const FilterModel& model,
                         const Eigen::Ref<const Eigen::VectorXd>& u,
                         const Eigen::Ref<const Eigen::VectorXd>& z);

// SVD filter with Joseph-form measurement update; never inverts D_P^{1/2}.
FilterState svdkf_time_update(const FilterState& state, const FilterModel& model,
                              const Eigen::Ref<const Eigen::VectorXd>& u);
StepResult svdkf_measurement_update(const FilterState& state, const FilterModel& model,
                                    const Eigen::Ref<const Eigen::VectorXd>& z);

/// One full time + measurement update for any filter kind.
StepResult step(FilterKind kind, const FilterState& state, const FilterModel& model,
                const Eigen::Ref<const Eigen::VectorXd>& u,
                const Eigen::Ref<const Eigen::VectorXd>& z);

// ---------------------------------------------------------------------------
// Log-likelihood of the innovation sequence,
//   L = -(K m / 2) ln(2 pi) - 1/2 sum_k { ln det R_{e,k} + e_k^T R_{e,k}^{-1} e_k }.

struct InnovationTerms {
  double log_det = 0.0;    // ln det R_e
  double quadratic = 0.0;  // e^T R_e^{-1} e
};

/// From the full innovation covariance. Throws Error(singular_innovation_cov)
/// unless R_e is positive definite.
InnovationTerms conventional_terms(const Eigen::Ref<const Eigen::MatrixXd>& innovation_cov,
                                   const Eigen::Ref<const Eigen::VectorXd>& innovation);

/// From SVD factors: ln det D and ebar^T D^{-1} ebar with D = d_sqrt^2.
InnovationTerms svd_terms(const Eigen::Ref<const Eigen::VectorXd>& d_sqrt,
                          const Eigen::Ref<const Eigen::VectorXd>& normalized_innovation);

/// Uses the reconstructed innovation covariance of every report.
double loglik_conventional(std::span<const StepReport> reports);

/// Uses {Q_Re, D_Re, ebar} of every report; requires SvdCov innovation
/// covariances and normalized innovations (SVD-KF reports).
double loglik_svd(std::span<const StepReport> reports);

}  // namespace fkf

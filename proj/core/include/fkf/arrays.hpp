#pragma once

#include <Eigen/Core>

namespace fkf::arrays {

// Tolerances shared by the factorization kernels. `recon` is relative to the
// norm of the reconstructed Gram matrix; `sym` and `psd` are scaled by the
// matrix norm and the largest diagonal entry respectively.
inline constexpr double kTolOrth = 1e-10;
inline constexpr double kTolRecon = 1e-10;
inline constexpr double kTolSym = 1e-12;
inline constexpr double kTolPsd = 1e-12;

// Factors of A = W [diag(singular_values); 0] V^T for a (k+s) x s pre-array.
// singular_values are sorted descending; A^T A = V diag(sv^2) V^T.
struct SvdPostArray {
  Eigen::MatrixXd w;
  Eigen::VectorXd singular_values;
  Eigen::MatrixXd v;
};

// Same as SvdPostArray without the left factor, which no filter reads.
struct SvdRightFactors {
  Eigen::VectorXd singular_values;
  Eigen::MatrixXd v;
};

// P = U diag(d) U^T with U unit upper-triangular.
struct UdPair {
  Eigen::MatrixXd u;
  Eigen::VectorXd d;
};

// Symmetric PSD matrix as Q diag(d_sqrt^2) Q^T, d_sqrt descending.
struct SvdFactors {
  Eigen::MatrixXd q;
  Eigen::VectorXd d_sqrt;
};

/// Full SVD of a pre-array with rows >= cols (Golub-Kahan via LAPACK dgesvd).
/// Throws Error(invalid_input) on non-finite entries or rows < cols and
/// Error(factorization_failure) if the backend does not converge.
SvdPostArray svd_array_update(const Eigen::Ref<const Eigen::MatrixXd>& pre);

/// svd_array_update without materializing W.
SvdRightFactors svd_array_right(const Eigen::Ref<const Eigen::MatrixXd>& pre);

/// Upper-triangular S with S^T S = m. Pivots within [-tau_psd, tau_psd] are
/// clamped to zero together with the rest of their row, so rank-deficient
/// PSD input is accepted.
Eigen::MatrixXd cholesky_upper(const Eigen::Ref<const Eigen::MatrixXd>& m);

/// Upper-triangular R (nonnegative diagonal) with R^T R = A^T A.
Eigen::MatrixXd qr_triangularize(const Eigen::Ref<const Eigen::MatrixXd>& pre);

/// Modified weighted Gram-Schmidt: U diag(d) U^T = basis diag(weights) basis^T
/// for an n x k basis, k >= n. A rank-deficient weighted Gram matrix yields
/// zero entries in d rather than an error.
UdPair mwgs(const Eigen::Ref<const Eigen::MatrixXd>& basis,
            const Eigen::Ref<const Eigen::VectorXd>& weights);

/// UD factorization of a symmetric PSD matrix (zero pivots tolerated).
UdPair ud_factorize(const Eigen::Ref<const Eigen::MatrixXd>& m);

/// SVD factors of a symmetric PSD matrix.
SvdFactors psd_svd(const Eigen::Ref<const Eigen::MatrixXd>& m);

// Symmetry and PSD checks used by model validation.
bool is_symmetric(const Eigen::Ref<const Eigen::MatrixXd>& m);
bool is_psd(const Eigen::Ref<const Eigen::MatrixXd>& m);

}  // namespace fkf::arrays

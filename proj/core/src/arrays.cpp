#include "fkf/arrays.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <lapacke.h>

#include "fkf/errors.hpp"

namespace fkf::arrays {
namespace {

void require_pre_array(const Eigen::Ref<const Eigen::MatrixXd>& pre,
                       const char* who) {
  if (pre.rows() < pre.cols() || pre.cols() == 0) {
    throw Error(ErrorCode::invalid_input,
                std::string(who) + ": pre-array must have rows >= cols > 0");
  }
  if (!pre.allFinite()) {
    throw Error(ErrorCode::invalid_input,
                std::string(who) + ": pre-array has non-finite entries");
  }
}

void require_square(const Eigen::Ref<const Eigen::MatrixXd>& m,
                    const char* who) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorCode::invalid_input,
                std::string(who) + ": matrix must be square");
  }
  if (!m.allFinite()) {
    throw Error(ErrorCode::invalid_input,
                std::string(who) + ": matrix has non-finite entries");
  }
}

// Thin wrapper around dgesvd; `want_w` selects jobu = 'A' or 'N'.
void lapack_svd(const Eigen::Ref<const Eigen::MatrixXd>& pre, bool want_w,
                Eigen::MatrixXd* w, Eigen::VectorXd* sv, Eigen::MatrixXd* v) {
  const lapack_int rows = static_cast<lapack_int>(pre.rows());
  const lapack_int cols = static_cast<lapack_int>(pre.cols());
  Eigen::MatrixXd a = pre;  // dgesvd overwrites its input
  sv->resize(cols);
  Eigen::MatrixXd vt(cols, cols);
  std::vector<double> superb(static_cast<std::size_t>(std::max(cols - 1, 1)));
  double* u_ptr = nullptr;
  lapack_int ldu = 1;
  if (want_w) {
    w->resize(rows, rows);
    u_ptr = w->data();
    ldu = rows;
  }
  const lapack_int info = LAPACKE_dgesvd(
      LAPACK_COL_MAJOR, want_w ? 'A' : 'N', 'A', rows, cols, a.data(), rows,
      sv->data(), u_ptr, ldu, vt.data(), cols, superb.data());
  if (info != 0) {
    throw Error(ErrorCode::factorization_failure,
                "svd: dgesvd failed with info = " + std::to_string(info));
  }
  *v = vt.transpose();
}

}  // namespace

SvdPostArray svd_array_update(const Eigen::Ref<const Eigen::MatrixXd>& pre) {
  require_pre_array(pre, "svd_array_update");
  SvdPostArray out;
  lapack_svd(pre, true, &out.w, &out.singular_values, &out.v);
  return out;
}

SvdRightFactors svd_array_right(const Eigen::Ref<const Eigen::MatrixXd>& pre) {
  require_pre_array(pre, "svd_array_right");
  SvdRightFactors out;
  lapack_svd(pre, false, nullptr, &out.singular_values, &out.v);
  return out;
}

Eigen::MatrixXd cholesky_upper(const Eigen::Ref<const Eigen::MatrixXd>& m) {
  require_square(m, "cholesky_upper");
  if (!is_symmetric(m)) {
    throw Error(ErrorCode::invalid_input, "cholesky_upper: matrix not symmetric");
  }
  const Eigen::Index n = m.rows();
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n, n);
  if (n == 0) return s;

  const double tau = kTolPsd * std::max(m.diagonal().maxCoeff(), 0.0);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double pivot = m(j, j) - s.col(j).head(j).squaredNorm();
    if (pivot < -tau) {
      throw Error(ErrorCode::not_positive_semidefinite,
                  "cholesky_upper: negative pivot at column " + std::to_string(j));
    }
    if (pivot <= tau) {
      continue;  // semidefinite direction: row j stays zero
    }
    const double sjj = std::sqrt(pivot);
    s(j, j) = sjj;
    for (Eigen::Index c = j + 1; c < n; ++c) {
      s(j, c) = (m(j, c) - s.col(j).head(j).dot(s.col(c).head(j))) / sjj;
    }
  }
  return s;
}

Eigen::MatrixXd qr_triangularize(const Eigen::Ref<const Eigen::MatrixXd>& pre) {
  require_pre_array(pre, "qr_triangularize");
  const Eigen::Index s = pre.cols();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(pre);
  Eigen::MatrixXd r =
      qr.matrixQR().topRows(s).triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < s; ++i) {
    if (r(i, i) < 0.0) r.row(i) *= -1.0;
  }
  return r;
}

UdPair mwgs(const Eigen::Ref<const Eigen::MatrixXd>& basis,
            const Eigen::Ref<const Eigen::VectorXd>& weights) {
  const Eigen::Index n = basis.rows();
  const Eigen::Index k = basis.cols();
  if (k < n || weights.size() != k) {
    throw Error(ErrorCode::invalid_input,
                "mwgs: basis must be n x k with k >= n and k weights");
  }
  if (!basis.allFinite() || !weights.allFinite() || (weights.array() < 0.0).any()) {
    throw Error(ErrorCode::invalid_input,
                "mwgs: non-finite basis or negative weights");
  }

  Eigen::MatrixXd w = basis;
  UdPair out{Eigen::MatrixXd::Identity(n, n), Eigen::VectorXd::Zero(n)};
  for (Eigen::Index j = n - 1; j >= 0; --j) {
    const Eigen::VectorXd weighted = w.row(j).transpose().cwiseProduct(weights);
    const double dj = w.row(j).dot(weighted);
    out.d(j) = dj;
    if (!(dj > 0.0)) {
      out.d(j) = 0.0;
      continue;
    }
    for (Eigen::Index i = 0; i < j; ++i) {
      const double uij = w.row(i).dot(weighted) / dj;
      out.u(i, j) = uij;
      w.row(i) -= uij * w.row(j);
    }
  }
  return out;
}

UdPair ud_factorize(const Eigen::Ref<const Eigen::MatrixXd>& m) {
  require_square(m, "ud_factorize");
  if (!is_symmetric(m)) {
    throw Error(ErrorCode::invalid_input, "ud_factorize: matrix not symmetric");
  }
  const Eigen::Index n = m.rows();
  UdPair out{Eigen::MatrixXd::Identity(n, n), Eigen::VectorXd::Zero(n)};
  if (n == 0) return out;

  Eigen::MatrixXd p = m;
  const double tau = kTolPsd * std::max(m.diagonal().maxCoeff(), 0.0);
  for (Eigen::Index j = n - 1; j >= 0; --j) {
    const double dj = p(j, j);
    if (dj < -tau) {
      throw Error(ErrorCode::not_positive_semidefinite,
                  "ud_factorize: negative pivot at column " + std::to_string(j));
    }
    if (dj <= tau) {
      continue;  // d(j) = 0, column j of U stays the unit vector
    }
    out.d(j) = dj;
    for (Eigen::Index c = 0; c < j; ++c) {
      const double beta = p(c, j);
      out.u(c, j) = beta / dj;
      for (Eigen::Index r = 0; r <= c; ++r) {
        p(r, c) -= beta * out.u(r, j);
      }
    }
  }
  return out;
}

SvdFactors psd_svd(const Eigen::Ref<const Eigen::MatrixXd>& m) {
  require_square(m, "psd_svd");
  if (m.rows() == 0) return {};
  SvdPostArray f = svd_array_update(m);
  // For symmetric PSD input the left and right singular vectors coincide on
  // the range; W is the factor carried as Q.
  return {std::move(f.w), f.singular_values.cwiseSqrt()};
}

bool is_symmetric(const Eigen::Ref<const Eigen::MatrixXd>& m) {
  if (m.rows() != m.cols()) return false;
  if (m.size() == 0) return true;
  const double scale = m.cwiseAbs().maxCoeff();
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= kTolSym * scale;
}

bool is_psd(const Eigen::Ref<const Eigen::MatrixXd>& m) {
  if (!is_symmetric(m) || !m.allFinite()) return false;
  if (m.size() == 0) return true;
  const Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd ev = es.eigenvalues();
  const double scale = ev.cwiseAbs().maxCoeff();
  return ev.minCoeff() >= -kTolPsd * scale;
}

}  // namespace fkf::arrays

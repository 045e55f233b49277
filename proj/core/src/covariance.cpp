#include <array>
#include <string>
#include <utility>

#include "fkf/filters.hpp"

namespace fkf {
namespace {

constexpr std::array<std::pair<FilterKind, std::string_view>, 5> kFilterNames{{
    {FilterKind::kf, "kf"},
    {FilterKind::srkf, "srkf"},
    {FilterKind::udkf, "udkf"},
    {FilterKind::svd_srkf, "svd-srkf"},
    {FilterKind::svd_kf, "svd-kf"},
}};

}  // namespace

std::string_view to_string(FilterKind kind) noexcept {
  for (const auto& [k, name] : kFilterNames) {
    if (k == kind) return name;
  }
  return "?";
}

std::optional<FilterKind> parse_filter_kind(std::string_view name) noexcept {
  for (const auto& [k, n] : kFilterNames) {
    if (n.size() != name.size()) continue;
    bool match = true;
    for (std::size_t i = 0; i < n.size() && match; ++i) {
      const char c = name[i] == '_' ? '-' : name[i];
      match = c == n[i];
    }
    if (match) return k;
  }
  return std::nullopt;
}

std::string_view to_string(FailureCause cause) noexcept {
  switch (cause) {
    case FailureCause::nan: return "nan";
    case FailureCause::inf: return "inf";
    case FailureCause::factorization_failure: return "factorization_failure";
    case FailureCause::singular_innovation_cov: return "singular_innovation_cov";
    case FailureCause::diagonal_inversion_underflow: return "diagonal_inversion_underflow";
  }
  return "?";
}

Eigen::MatrixXd reconstruct_covariance(const CovarianceRepr& cov) {
  Eigen::MatrixXd m = std::visit(
      [](const auto& c) -> Eigen::MatrixXd {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, FullCov>) {
          return c.p;
        } else if constexpr (std::is_same_v<T, CholCov>) {
          return c.s.transpose() * c.s;
        } else if constexpr (std::is_same_v<T, UdCov>) {
          return c.u * c.d.asDiagonal() * c.u.transpose();
        } else {
          return c.q * c.d_sqrt.array().square().matrix().asDiagonal() * c.q.transpose();
        }
      },
      cov);
  return 0.5 * (m + m.transpose());
}

bool all_finite(const CovarianceRepr& cov) {
  return std::visit(
      [](const auto& c) -> bool {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, FullCov>) {
          return c.p.allFinite();
        } else if constexpr (std::is_same_v<T, CholCov>) {
          return c.s.allFinite();
        } else if constexpr (std::is_same_v<T, UdCov>) {
          return c.u.allFinite() && c.d.allFinite();
        } else {
          return c.q.allFinite() && c.d_sqrt.allFinite();
        }
      },
      cov);
}

}  // namespace fkf

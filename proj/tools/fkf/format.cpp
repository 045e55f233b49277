#include "fkf/format.hpp"

#include <charconv>
#include <cmath>

namespace fkf::cli {
namespace {

std::optional<std::string> special(double value) {
  if (std::isnan(value)) return "NaN";
  if (std::isinf(value)) return value > 0 ? "Inf" : "-Inf";
  return std::nullopt;
}

}  // namespace

std::string format_number(double value, int digits) {
  if (auto s = special(value)) return *s;
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, digits);
  return std::string(buf, res.ptr);
}

std::string format_exact(double value) {
  if (auto s = special(value)) return *s;
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

std::string format_optional(const std::optional<double>& value, int digits) {
  return value ? format_number(*value, digits) : std::string();
}

}  // namespace fkf::cli

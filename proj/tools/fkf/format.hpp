#pragma once

#include <optional>
#include <string>

namespace fkf::cli {

/// Locale-independent number with `digits` significant digits; NaN and
/// infinities print as NaN, Inf and -Inf.
std::string format_number(double value, int digits = 6);

/// Shortest text that reads back to the same double.
std::string format_exact(double value);

std::string format_optional(const std::optional<double>& value, int digits = 6);

}  // namespace fkf::cli

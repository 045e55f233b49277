#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "fkf/model.hpp"

namespace fkf {

// Model documents are JSON objects with row-major nested arrays:
//   { "f": [[...]], "b": [[...]], "g": [[...]], "h": [[...]],
//     "theta": [[...]], "r": [[...]], "x0_mean": [...], "pi0": [[...]],
//     "overrides": [ {"k": 3, "field": "r", "matrix": [[...]]}, ... ] }
// "b" defaults to an n x 0 matrix and "g" to the identity when omitted.
// Parsing errors and failed validation throw Error(invalid_model).
StateSpaceModel parse_model_json(std::string_view text);
StateSpaceModel load_model_file(const std::filesystem::path& path);
std::string model_to_json(const StateSpaceModel& model);

/// "example1", "example2:<delta>" or a path to a model document.
StateSpaceModel resolve_model(std::string_view name_or_path);

}  // namespace fkf

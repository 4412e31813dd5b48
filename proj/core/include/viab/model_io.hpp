#pragma once

#include <string>
#include <string_view>

#include "viab/model.hpp"

namespace viab {

/// Parses a model document (see docs/model-format.md). Unknown fields and
/// malformed values raise ModelError naming the JSON path; syntax errors
/// carry the byte offset. The result is not validated.
Model model_from_json(std::string_view text);

/// Canonical JSON rendering; model_from_json(model_to_json(m)) reproduces m.
std::string model_to_json(const Model& model);

Model load_model(const std::string& path);
void save_model(const Model& model, const std::string& path);

}  // namespace viab

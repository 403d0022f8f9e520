#pragma once

// Internal JSON encoders shared by the scene serializer and the dataset sidecar.

#include <nlohmann/json.hpp>

#include "muvsim/muscle_model.hpp"

namespace muvsim::detail {

using Json = nlohmann::ordered_json;

Json scene_to_document(const MuscleScene& scene);
MuscleScene scene_from_document(const Json& doc);

/// JSON has no infinity; +inf is written as the string "inf".
Json db_to_json(double db);
double db_from_json(const Json& j);

}  // namespace muvsim::detail

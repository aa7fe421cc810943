#pragma once

#include "aoi/shs.hpp"

#include <string>
#include <string_view>

namespace aoi {

// JSON document layout:
//
//   {
//     "num_states": 2,
//     "num_components": 2,
//     "slopes": [[1, 0], [1, 1]],
//     "transitions": [
//       {"from": 0, "to": 1, "rate": 1.0, "reset_map": [[1, 0], [0, 0]]},
//       ...
//     ]
//   }
//
// reset_map is dense and row-major: x' = x * reset_map.

std::string model_to_json(const ShsModel& model, int indent = 2);

/// Parses and validates through build_model. Throws ModelError on malformed
/// documents as well as on invalid models.
ShsModel model_from_json(std::string_view text);

}  // namespace aoi

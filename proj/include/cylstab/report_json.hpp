#pragma once

#include <json.hpp>

#include "cylstab/stability.hpp"

namespace cylstab {

/// StabilityReport as a single JSON document: lower_snake_case keys,
/// +infinity encoded as the string "inf", not-applicable as null.
nlohmann::ordered_json report_to_json(const StabilityReport& report);

}  // namespace cylstab

#pragma once

#include <json.hpp>

#include "agentmix/core.hpp"

namespace agentmix {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

/// Rationals travel as strings ("1/3"); plain JSON integers are accepted.
Rational rational_from_json(const json& j);
json rational_to_json(const Rational& r);

/// {"a": "1/2", "b": "1/2"}; unlisted actions get mass 0.
Dist action_dist_from_json(const Spaces& spaces, const json& j);
json action_dist_to_json(const Spaces& spaces, const Dist& d);

/// {"(o,1)": "1/2", "(o,-1)": "1/2"}; unlisted percepts get mass 0.
Dist percept_dist_from_json(const Spaces& spaces, const json& j);
json percept_dist_to_json(const Spaces& spaces, const Dist& d);

}  // namespace agentmix

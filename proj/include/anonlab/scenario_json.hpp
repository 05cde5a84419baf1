#pragma once

// JSON form of scenarios and warps. Rationals are "num/den" strings and
// states are plain strings:
//   {"kind":"step","breakpoints":["0/1"],"values":["A","B"]}
//   {"kind":"periodic","period":"1/1","starts":["0/1","1/2"],"values":["A","B"]}
//   {"kind":"logperiodic","fixedPoint":"0/1","ratio":"2/1",
//    "minus":{"starts":[...],"values":[...]},"valueAtP":"A",
//    "plus":{"starts":[...],"values":[...]}}
// Log-periodic pattern starts are offsets from the fixed point.

#include "anonlab/scenario.hpp"

#include <json.hpp>

namespace anonlab {

nlohmann::json to_json(const Scenario& f);
Scenario scenario_from_json(const nlohmann::json& j);

nlohmann::json to_json(const AffineWarp& t);
AffineWarp warp_from_json(const nlohmann::json& j);

}  // namespace anonlab

#pragma once

// JSON conversions shared by the line-delimited file formats.

#include "json.hpp"

#include "pet/action.hpp"
#include "pet/engine.hpp"
#include "pet/task.hpp"
#include "pet/world.hpp"

namespace pet {

using nlohmann::json;

void to_json(json& j, const TaskSpec& t);
void from_json(const json& j, TaskSpec& t);
void to_json(json& j, const ReceptacleInstance& r);
void from_json(const json& j, ReceptacleInstance& r);
void to_json(json& j, const ObjectInstance& o);
void from_json(const json& j, ObjectInstance& o);
void to_json(json& j, const WorldState& s);
void from_json(const json& j, WorldState& s);
void to_json(json& j, const Observation& o);
void from_json(const json& j, Observation& o);

}  // namespace pet

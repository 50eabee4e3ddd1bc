#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "pet/action.hpp"
#include "pet/task.hpp"
#include "pet/world.hpp"

namespace pet {

// One observation as the agent sees it. `preamble` is the part of the text
// that reports what just happened; `listed` is the entity listing that
// follows it ("you see a x, and a y."), when there is one.
struct Observation {
  std::string preamble;
  bool has_listing = false;
  std::vector<std::string> listed;
  std::vector<std::string> receptacles;  // receptacle names appearing in text
  std::vector<std::string> objects;      // object names appearing in text
  std::string text;

  bool operator==(const Observation&) const = default;
};

// Builds text from the parts and classifies every entity name it contains.
Observation compose_observation(const WorldState& state, std::string preamble, bool has_listing,
                                std::vector<std::string> listed);

std::string initial_feedback(const WorldState& state);
Observation render_observation(const WorldState& state, std::string_view feedback);

std::vector<Action> permissible_actions(const WorldState& state);
bool is_permissible(const WorldState& state, const Action& action);

struct StepResult {
  WorldState state;
  std::string feedback;
  bool done = false;
};

inline constexpr std::string_view kNothingHappens = "Nothing happens.";

StepResult step(const WorldState& state, const TaskSpec& task, const Action& action);

bool goal_satisfied(const WorldState& state, const TaskSpec& task);

// Whether sub-task `s` holds. `ordinal` is 1 for the first place sub-task of
// a plan and 2 for the second (pick_two); a place holds when one target
// instance contains at least `ordinal` matching objects.
bool subtask_satisfied(const WorldState& state, const SubTask& s, int ordinal = 1);

}  // namespace pet

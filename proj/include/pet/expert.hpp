#pragma once

#include <set>
#include <string>
#include <vector>

#include "pet/action.hpp"
#include "pet/catalog.hpp"
#include "pet/engine.hpp"
#include "pet/phrasebook.hpp"
#include "pet/task.hpp"
#include "pet/world.hpp"

namespace pet {

struct DemoStep {
  Observation observation;
  std::vector<std::string> permissible;
  Action action;
  int subtask_index = 1;  // 1-based active sub-task when the action was taken
};

struct Demonstration {
  TaskSpec task;
  WorldState initial;
  WorldState final_state;
  std::vector<DemoStep> steps;
  std::vector<std::string> subtask_plan;
  std::set<std::string> touched;
  bool solved = false;
};

// Canonical sub-task strings for a task.
std::vector<std::string> ground_truth_plan(const TaskSpec& task, const Phrasebook& pb = Phrasebook::builtin());

struct ExpertOptions {
  int step_budget = 100;
};

// Receptacle visiting order when looking for `object_class`: likely
// containers by rank, then other openables, then the rest. Light sources
// are left out since they hold nothing.
std::vector<int> search_order(const WorldState& state, const Catalog& catalog, std::string_view object_class);

// Rule-based solver. The expert only knows what it has seen: it searches
// receptacles in search_order, opening and closing as it goes. On budget
// exhaustion the returned demo has solved == false.
Demonstration solve(const WorldState& state, const TaskSpec& task, const Catalog& catalog = Catalog::builtin(),
                    const ExpertOptions& options = {}, const Phrasebook& pb = Phrasebook::builtin());

// Every instance name used as an action argument.
std::set<std::string> touched_entities(const Demonstration& demo);

}  // namespace pet

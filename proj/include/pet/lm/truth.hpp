#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pet/catalog.hpp"
#include "pet/expert.hpp"
#include "pet/phrasebook.hpp"
#include "pet/task.hpp"
#include "pet/world.hpp"

namespace pet::lm {

// Ground truth the oracle answers from, for one episode. The episode runner
// keeps `state` current.
struct EpisodeTruth {
  const Catalog* catalog = &Catalog::builtin();
  const Phrasebook* phrasebook = &Phrasebook::builtin();
  TaskSpec task;
  Demonstration demo;
  WorldState state;

  static EpisodeTruth from_scene(const WorldState& initial, const TaskSpec& task,
                                 const Catalog& catalog = Catalog::builtin(),
                                 const Phrasebook& pb = Phrasebook::builtin());

  // Class names present in the scene, used to disambiguate synonyms.
  std::vector<std::string> scene_classes() const;

  // Entities that matter for the whole task: everything the expert used plus
  // every instance of the target classes.
  std::set<std::string> relevant_for_task() const;
  // Entities the expert used while `s` was active, plus instances of the
  // classes `s` names.
  std::set<std::string> relevant_for_subtask(const SubTask& s) const;
};

}  // namespace pet::lm

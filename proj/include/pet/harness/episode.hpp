#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pet/action.hpp"
#include "pet/agent/params.hpp"
#include "pet/harness/trajectory.hpp"
#include "pet/lm/truth.hpp"
#include "pet/planner.hpp"
#include "pet/scene.hpp"
#include "pet/tracker.hpp"

namespace pet::harness {

struct AgentView {
  int t = 0;
  const std::string& conditioning;
  const std::vector<agent::Vec>& history;  // embeddings of earlier observations as fed
  const Observation& observation;         // as fed
  const std::vector<std::string>& actions;
  const WorldState& state;
};

// Returns an index into view.actions.
using AgentFn = std::function<int(const AgentView&)>;

// Greedy action attention policy.
AgentFn policy_agent(const agent::PolicyParams& params, lm::Backend& bridge);
AgentFn random_agent(std::uint64_t seed);
// Plays the given commands in order, then "look".
AgentFn scripted_agent(std::vector<Action> script);

struct EpisodeOptions {
  PipelineFlags flags;
  int step_budget = 50;
  EliminatorConfig eliminate;
  std::size_t plan_k = 5;
  std::optional<std::string> goal_text;  // overrides the scene's goal text
  const ExampleBank* bank = nullptr;     // required when planning
};

// Runs one episode. `truth` may be null for non-oracle backends; when given
// its state is kept in step with the engine.
Trajectory run_episode(const Scene& scene, lm::Backend& bridge, lm::EpisodeTruth* truth, const AgentFn& agent,
                       const EpisodeOptions& options);

// Plan used by the pipeline: generated when planning is on, the ground
// truth when only tracking is on, empty otherwise.
std::vector<std::string> pipeline_plan(const Scene& scene, const std::string& goal, lm::Backend& bridge,
                                       const EpisodeOptions& options);

}  // namespace pet::harness

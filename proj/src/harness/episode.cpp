#include "pet/harness/episode.hpp"

#include <spdlog/spdlog.h>

#include "pet/agent/actor.hpp"
#include "pet/expert.hpp"
#include "pet/rng.hpp"

namespace pet::harness {

AgentFn policy_agent(const agent::PolicyParams& params, lm::Backend& bridge) {
  return [&params, &bridge](const AgentView& v) {
    return agent::act(params, bridge, v.conditioning, v.history, v.observation.text, v.actions).index;
  };
}

AgentFn random_agent(std::uint64_t seed) {
  auto rng = std::make_shared<Rng>(seed);
  return [rng](const AgentView& v) { return static_cast<int>(rng->below(v.actions.size())); };
}

AgentFn scripted_agent(std::vector<Action> script) {
  auto next = std::make_shared<std::size_t>(0);
  auto cmds = std::make_shared<std::vector<std::string>>();
  for (const auto& a : script) cmds->push_back(a.text());
  return [next, cmds](const AgentView& v) {
    const std::string want = *next < cmds->size() ? (*cmds)[(*next)++] : "look";
    for (std::size_t i = 0; i < v.actions.size(); ++i)
      if (v.actions[i] == want) return static_cast<int>(i);
    throw std::runtime_error("scripted agent: '" + want + "' is not permissible");
  };
}

std::vector<std::string> pipeline_plan(const Scene& scene, const std::string& goal, lm::Backend& bridge,
                                       const EpisodeOptions& options) {
  if (options.flags.plan) {
    if (!options.bank) throw std::invalid_argument("planning needs an example bank");
    try {
      return generate_plan(bridge, *options.bank, goal, options.plan_k).subtasks;
    } catch (const lm::BackendError& e) {
      spdlog::warn("plan generation failed, using the full task: {}", e.what());
      return {goal};
    }
  }
  if (options.flags.track) return ground_truth_plan(scene.task);
  return {};
}

Trajectory run_episode(const Scene& scene, lm::Backend& bridge, lm::EpisodeTruth* truth, const AgentFn& agent,
                       const EpisodeOptions& options) {
  const auto& flags = options.flags;
  const std::string goal = options.goal_text.value_or(scene.task.goal_text);

  Trajectory traj;
  auto& h = traj.header;
  h.scene_seed = scene.seed;
  h.variant = scene.variant;
  h.task = scene.task;
  h.goal_text = goal;
  h.initial = scene.state;
  h.flags = flags;
  if (truth) {
    const auto rel = truth->relevant_for_task();
    h.relevant.assign(rel.begin(), rel.end());
  }
  h.plan = pipeline_plan(scene, goal, bridge, options);

  std::optional<TrackerState> tracker;
  if (flags.track) tracker = tracker_init(h.plan, goal);

  WorldState state = scene.state;
  std::string feedback = initial_feedback(state);
  std::vector<agent::Vec> history;

  auto track = [&](const Observation& obs, StepRecord& rec) {
    if (!tracker) return;
    rec.subtask_index = tracker->p;
    auto ts = tracker_step(*tracker, obs.text, bridge);
    rec.tracker_queried = ts.queried;
    rec.tracker_incremented = ts.incremented;
    rec.p_yes = ts.answer.p_yes;
    rec.conditioning = ts.conditioning;
    tracker = std::move(ts.state);
  };

  for (int t = 0; t < options.step_budget; ++t) {
    if (truth) truth->state = state;
    StepRecord rec;
    rec.t = t;
    rec.raw = render_observation(state, feedback);
    rec.conditioning = goal;
    track(rec.raw, rec);

    rec.fed = rec.raw;
    if (flags.eliminate) {
      rec.decisions = score_entities(bridge, rec.conditioning, rec.raw, options.eliminate);
      rec.fed = mask_observation(rec.raw, rec.decisions);
    }

    const auto actions = permissible_actions(state);
    for (const auto& a : actions) rec.permissible.push_back(a.text());
    const int idx = agent(AgentView{t, rec.conditioning, history, rec.fed, rec.permissible, state});
    if (idx < 0 || idx >= static_cast<int>(actions.size())) throw std::out_of_range("agent chose a missing action");
    rec.action = rec.permissible[static_cast<std::size_t>(idx)];
    history.push_back(agent::to_eigen(bridge.embed(rec.fed.text)));

    auto r = step(state, scene.task, actions[static_cast<std::size_t>(idx)]);
    check_invariants(r.state);
    rec.done = r.done;
    state = std::move(r.state);
    feedback = std::move(r.feedback);
    traj.steps.push_back(std::move(rec));
    if (traj.steps.back().done) {
      traj.done = true;
      break;
    }
  }

  // One more tracker look at the observation after the final action.
  if (tracker && !traj.steps.empty()) {
    if (truth) truth->state = state;
    StepRecord tail;
    track(render_observation(state, feedback), tail);
  }
  if (tracker) {
    traj.final_subtask_index = tracker->p;
    traj.plan_finished = tracker->p > static_cast<int>(tracker->plan.size());
  }
  return traj;
}

}  // namespace pet::harness

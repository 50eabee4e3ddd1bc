#include "pet/tracker.hpp"

#include <stdexcept>

#include <spdlog/spdlog.h>

#include "pet/engine.hpp"

namespace pet {

TrackerState tracker_init(std::vector<std::string> plan, std::string task_text) {
  if (plan.empty()) throw std::invalid_argument("tracker_init: empty plan");
  TrackerState s;
  s.plan = std::move(plan);
  s.task_text = std::move(task_text);
  return s;
}

std::string tracker_prompt(const TrackerState& state) {
  std::string out;
  for (const auto& o : state.window) out += o + "\n";
  const int idx = std::min<int>(state.p, static_cast<int>(state.plan.size())) - 1;
  return out + "Did you finish the task of " + state.plan[idx] + "?";
}

std::string conditioning_text(const TrackerState& state) {
  if (state.fallback_active || state.p > static_cast<int>(state.plan.size())) return state.task_text;
  return state.plan[state.p - 1];
}

TrackStep tracker_step(const TrackerState& state, const std::string& observation_text, lm::Backend& bridge) {
  TrackStep r;
  r.state = state;
  auto& s = r.state;
  if (!s.fallback_active) {
    s.window.push_back(observation_text);
    s.d = std::min(s.d + 1, kMaxWindow);
    while (static_cast<int>(s.window.size()) > s.d) s.window.pop_front();
    r.queried = true;
    try {
      r.answer = bridge.yes_no(tracker_prompt(s));
    } catch (const std::exception& e) {
      spdlog::warn("progress query failed, treating as No: {}", e.what());
      r.answer = {0.0, 1.0};
    }
    if (r.answer.p_yes > r.answer.p_no) {
      r.incremented = true;
      s.p += 1;
      s.d = 1;
      s.window.clear();
      if (s.p > static_cast<int>(s.plan.size())) s.fallback_active = true;
    }
  }
  r.conditioning = conditioning_text(s);
  return r;
}

bool replay_tracker(const Demonstration& demo, std::size_t steps, lm::Backend& bridge, lm::EpisodeTruth& truth) {
  steps = std::min(steps, demo.steps.size());
  auto tracker = tracker_init(demo.subtask_plan, demo.task.goal_text);
  WorldState state = demo.initial;
  truth.state = state;
  std::string obs = demo.steps.empty() ? render_observation(state, initial_feedback(state)).text
                                       : demo.steps.front().observation.text;
  for (std::size_t t = 0;; ++t) {
    tracker = tracker_step(tracker, obs, bridge).state;
    if (t == steps) break;
    auto res = step(state, demo.task, demo.steps[t].action);
    state = std::move(res.state);
    truth.state = state;
    obs = render_observation(state, res.feedback).text;
  }
  return tracker.p > static_cast<int>(tracker.plan.size());
}

TrackerMetrics evaluate_tracker(const std::vector<Demonstration>& demos, const BackendFactory& factory) {
  if (demos.empty()) throw std::invalid_argument("evaluate_tracker: no demonstrations");
  TrackerMetrics m;
  std::uint64_t episode = 0;
  for (const auto& demo : demos) {
    if (!demo.solved) throw std::invalid_argument("evaluate_tracker: demonstration is not solved");
    for (int positive = 1; positive >= 0; --positive) {
      const std::size_t steps = positive ? demo.steps.size() : (demo.steps.empty() ? 0 : demo.steps.size() - 1);
      auto truth = std::make_shared<lm::EpisodeTruth>();
      truth->task = demo.task;
      truth->demo = demo;
      truth->state = demo.initial;
      auto bridge = factory(truth, episode++);
      const bool event = replay_tracker(demo, steps, *bridge, *truth);
      if (positive)
        (event ? m.tp : m.fn) += 1;
      else
        (event ? m.fp : m.tn) += 1;
    }
  }
  m.precision = m.tp + m.fp ? static_cast<double>(m.tp) / (m.tp + m.fp) : 1.0;
  m.recall = m.tp + m.fn ? static_cast<double>(m.tp) / (m.tp + m.fn) : 0.0;
  return m;
}

}  // namespace pet

#pragma once

#include <deque>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "pet/expert.hpp"
#include "pet/lm/bridge.hpp"
#include "pet/lm/truth.hpp"

namespace pet {

inline constexpr int kMaxWindow = 3;

struct TrackerState {
  std::vector<std::string> plan;
  std::string task_text;  // conditioning once the plan is exhausted
  int p = 1;
  int d = 1;
  std::deque<std::string> window;
  bool fallback_active = false;
};

TrackerState tracker_init(std::vector<std::string> plan, std::string task_text);

std::string tracker_prompt(const TrackerState& state);
// Active sub-task, or the full task once the plan is exhausted.
std::string conditioning_text(const TrackerState& state);

struct TrackStep {
  TrackerState state;
  std::string conditioning;
  bool queried = false;
  bool incremented = false;
  lm::YesNo answer{0.0, 1.0};
};

// Backend failures count as "No".
TrackStep tracker_step(const TrackerState& state, const std::string& observation_text, lm::Backend& bridge);

// Reference transition for the window length.
inline int next_window(int d, bool incremented) { return incremented ? 1 : std::min(d + 1, kMaxWindow); }

using BackendFactory =
    std::function<std::shared_ptr<lm::Backend>(std::shared_ptr<lm::EpisodeTruth> truth, std::uint64_t episode)>;

struct TrackerMetrics {
  double precision = 0;
  double recall = 0;
  int tp = 0, fp = 0, fn = 0, tn = 0;
};

// Replays each demo through a fresh backend and tracker. A demo counts as
// positive (solved); the same demo cut before its final action counts as a
// negative. The event is "the tracker marked the last sub-task finished".
TrackerMetrics evaluate_tracker(const std::vector<Demonstration>& demos, const BackendFactory& factory);

// Whether the tracker finished the whole plan over the first `steps` steps
// of `demo` (and the observation that followed them).
bool replay_tracker(const Demonstration& demo, std::size_t steps, lm::Backend& bridge, lm::EpisodeTruth& truth);

}  // namespace pet

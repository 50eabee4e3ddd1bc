#include "doctest.h"
#include "fixtures.hpp"

#include "pet/expert.hpp"
#include "pet/lm/oracle.hpp"
#include "pet/scene.hpp"
#include "pet/tracker.hpp"

using namespace pet;

namespace {

// Answers from a fixed script; anything past its end is No.
struct Scripted : lm::OracleBackend {
  std::vector<int> answers;  // 1 yes, 0 no, -1 throw
  std::size_t i = 0;
  std::vector<std::string> prompts;
  Scripted(std::vector<int> a) : lm::OracleBackend({0.0, 1, 16}), answers(std::move(a)) {}
  lm::YesNo yes_no(const std::string& p) override {
    prompts.push_back(p);
    const int a = i < answers.size() ? answers[i++] : 0;
    if (a < 0) throw lm::BackendError("down", 500);
    return a ? lm::YesNo{0.9, 0.1} : lm::YesNo{0.1, 0.9};
  }
};

}  // namespace

TEST_CASE("window transition table") {
  for (int d = 1; d <= kMaxWindow; ++d)
    for (int yes = 0; yes <= 1; ++yes) {
      TrackerState s = tracker_init({"a", "b"}, "task");
      s.d = d;
      for (int k = 0; k < d - 1; ++k) s.window.push_back("o" + std::to_string(k));
      const int p = s.p;
      Scripted b({yes});
      const auto r = tracker_step(s, "now", b);
      CHECK(r.incremented == static_cast<bool>(yes));
      CHECK(r.state.p == p + yes);
      CHECK(r.state.d == next_window(d, yes));
      CHECK(static_cast<int>(r.state.window.size()) == (yes ? 0 : d));
    }
  CHECK(next_window(1, false) == 2);
  CHECK(next_window(3, false) == 3);
  CHECK(next_window(2, true) == 1);
}

TEST_CASE("prompt holds the window and the active sub-task") {
  TrackerState s = tracker_init({"take a mug", "place the mug in/on cabinet"}, "put a mug in cabinet");
  Scripted b({0, 0, 0, 1});
  for (const char* o : {"o1", "o2", "o3", "o4"}) s = tracker_step(s, o, b).state;
  CHECK(b.prompts[0] == "o1\nDid you finish the task of take a mug?");
  CHECK(b.prompts[2] == "o1\no2\no3\nDid you finish the task of take a mug?");
  CHECK(b.prompts[3] == "o2\no3\no4\nDid you finish the task of take a mug?");
  CHECK(s.p == 2);
  CHECK(conditioning_text(s) == "place the mug in/on cabinet");
}

TEST_CASE("fallback after the last sub-task, and fail-No") {
  TrackerState s = tracker_init({"a"}, "whole task");
  Scripted b({-1, 1, 1});
  auto r = tracker_step(s, "x", b);
  CHECK_FALSE(r.incremented);
  CHECK(r.conditioning == "a");
  r = tracker_step(r.state, "y", b);
  CHECK(r.incremented);
  CHECK(r.state.fallback_active);
  CHECK(r.conditioning == "whole task");
  r = tracker_step(r.state, "z", b);
  CHECK_FALSE(r.queried);
  CHECK(r.conditioning == "whole task");
  CHECK_THROWS(tracker_init({}, "t"));
}

TEST_CASE("oracle tracker on the example rollout finishes all four sub-tasks") {
  const auto demo = solve(fixtures::rollout_state(), fixtures::rollout_task());
  auto truth = std::make_shared<lm::EpisodeTruth>(lm::EpisodeTruth::from_scene(demo.initial, demo.task));
  lm::OracleBackend o({0.0, 1, 64}, truth);
  CHECK(replay_tracker(demo, demo.steps.size(), o, *truth));
  auto truth2 = std::make_shared<lm::EpisodeTruth>(lm::EpisodeTruth::from_scene(demo.initial, demo.task));
  lm::OracleBackend o2({0.0, 1, 64}, truth2);
  CHECK_FALSE(replay_tracker(demo, demo.steps.size() - 1, o2, *truth2));
}

#include "doctest.h"
#include "fixtures.hpp"

#include "pet/engine.hpp"
#include "pet/expert.hpp"
#include "pet/scene.hpp"

using namespace pet;

TEST_CASE("expert solves the example scene with the rollout's verb skeleton") {
  const auto demo = solve(fixtures::rollout_state(), fixtures::rollout_task());
  REQUIRE(demo.solved);
  std::vector<Verb> verbs;
  for (const auto& st : demo.steps) verbs.push_back(st.action.verb);
  // goto+, take, goto, open, put, close, goto, take, goto, open, put
  std::size_t i = 0;
  while (i < verbs.size() && verbs[i] == Verb::go_to) ++i;
  CHECK(i >= 1);
  const std::vector<Verb> tail{Verb::take, Verb::go_to, Verb::open,  Verb::put,  Verb::close, Verb::go_to,
                               Verb::take, Verb::go_to, Verb::open,  Verb::put};
  CHECK(std::vector<Verb>(verbs.begin() + static_cast<std::ptrdiff_t>(i), verbs.end()) == tail);
  CHECK(demo.subtask_plan == std::vector<std::string>{"take a soapbar", "place the soapbar in/on cabinet",
                                                      "take a soapbar", "place the soapbar in/on cabinet"});
  CHECK(demo.touched.count("soapbar 1"));
  CHECK(demo.touched.count("soapbar 2"));
  CHECK(demo.touched.count("cabinet 1"));
  CHECK_FALSE(demo.touched.count("cloth 1"));
}

TEST_CASE("ground truth plans") {
  const auto& pb = Phrasebook::builtin();
  TaskSpec heat{TaskType::heat_and_place, "apple", "fridge", "", 0};
  CHECK(ground_truth_plan(heat, pb) ==
        std::vector<std::string>{"take an apple", "heat the apple", "place the apple in/on fridge"});
  TaskSpec look{TaskType::examine_in_light, "book", "desklamp", "", 0};
  CHECK(ground_truth_plan(look, pb) == std::vector<std::string>{"take a book", "examine the book with the desklamp"});
}

TEST_CASE("expert demos replay and respect sub-task order") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto scene = generate_scene(seed);
    const auto demo = solve(scene.state, scene.task);
    REQUIRE(demo.solved);
    CHECK(demo.steps.size() <= 100);
    WorldState s = demo.initial;
    int last_subtask = 1;
    for (const auto& st : demo.steps) {
      CHECK(is_permissible(s, st.action));
      CHECK(st.subtask_index >= last_subtask);
      last_subtask = st.subtask_index;
      s = step(s, scene.task, st.action).state;
    }
    CHECK(s == demo.final_state);
    CHECK(goal_satisfied(s, scene.task));
    CHECK(touched_entities(demo) == demo.touched);
  }
}

TEST_CASE("exhausted budget reports failure") {
  const auto demo = solve(fixtures::rollout_state(), fixtures::rollout_task(), Catalog::builtin(), {3});
  CHECK_FALSE(demo.solved);
  CHECK(demo.steps.size() <= 3);
}

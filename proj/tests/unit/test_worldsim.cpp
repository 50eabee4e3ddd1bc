#include <set>

#include "doctest.h"
#include "fixtures.hpp"

#include "pet/action.hpp"
#include "pet/engine.hpp"
#include "pet/rng.hpp"
#include "pet/scene.hpp"
#include "pet/text.hpp"

using namespace pet;

namespace {

StepResult run(WorldState& s, const TaskSpec& t, const std::string& cmd) {
  auto r = step(s, t, parse_command(cmd));
  s = r.state;
  return r;
}

}  // namespace

TEST_CASE("example rollout renders the same text") {
  auto s = fixtures::rollout_state();
  const auto task = fixtures::rollout_task();
  check_invariants(s);
  CHECK(render_observation(s, initial_feedback(s)).text ==
        "Looking quickly around you, you see a cabinet 4, a cabinet 3, a cabinet 2, a cabinet 1, a countertop 1, a "
        "garbagecan 1, a handtowelholder 2, a handtowelholder 1, a sinkbasin 2, a sinkbasin 1, a toilet 1, and a "
        "towelholder 1.");
  CHECK(run(s, task, "go to toilet 1").feedback == "On the toilet 1, you see nothing.");
  CHECK(run(s, task, "go to countertop 1").feedback == "On the countertop 1, you see a soapbar 2, and a soapbar 1.");
  CHECK(run(s, task, "take soapbar 1 from countertop 1").feedback == "You pick up the soapbar 1 from the countertop 1.");
  CHECK(run(s, task, "go to cabinet 1").feedback == "The cabinet 1 is closed.");
  CHECK(run(s, task, "open cabinet 1").feedback == "The cabinet 1 is open. In it, you see a cloth 1.");
  CHECK(run(s, task, "put soapbar 1 in/on cabinet 1").feedback == "You put the soapbar 1 in/on the cabinet 1.");
  CHECK(run(s, task, "close cabinet 1").feedback == "You close the cabinet 1.");
  CHECK(run(s, task, "go to countertop 1").feedback == "On the countertop 1, you see a soapbar 2.");
  run(s, task, "take soapbar 2 from countertop 1");
  run(s, task, "go to cabinet 1");
  run(s, task, "open cabinet 1");
  auto last = run(s, task, "put soapbar 2 in/on cabinet 1");
  CHECK(last.done);
  CHECK(goal_satisfied(s, task));
}

TEST_CASE("command parsing") {
  CHECK(parse_command("Go To Cabinet 1").text() == "go to cabinet 1");
  CHECK(parse_command("goto cabinet 1").text() == "go to cabinet 1");
  CHECK(parse_command("put soapbar 1 in cabinet 1").text() == "put soapbar 1 in/on cabinet 1");
  CHECK(parse_command("put soapbar 1 on cabinet 1.").text() == "put soapbar 1 in/on cabinet 1");
  CHECK(parse_command("heat apple 1 with microwave 1").verb == Verb::heat);
  CHECK(parse_command("use desklamp 1").receptacle == "desklamp 1");
  CHECK(parse_command("look").verb == Verb::look);
  CHECK_THROWS_AS(parse_command("jump"), ParseError);
  CHECK_THROWS_AS(parse_command("go to cabinet 01"), ParseError);
  CHECK_THROWS_AS(parse_command("take soapbar 1 from"), ParseError);
  CHECK_THROWS_AS(parse_command(""), ParseError);
}

TEST_CASE("impermissible actions change nothing") {
  auto s = fixtures::rollout_state();
  const auto task = fixtures::rollout_task();
  const auto before = s;
  for (const char* cmd : {"take soapbar 1 from countertop 1", "open cabinet 1", "put soapbar 1 in/on cabinet 1",
                          "go to fridge 1", "use desklamp 1", "heat soapbar 1 with microwave 1"}) {
    auto r = step(s, task, parse_command(cmd));
    CHECK(r.feedback == kNothingHappens);
    CHECK(r.state == before);
  }
}

TEST_CASE("random walks keep invariants, and every permissible action does something") {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const auto scene = generate_scene(seed);
    WorldState s = scene.state;
    Rng rng(seed);
    for (int t = 0; t < 80; ++t) {
      const auto acts = permissible_actions(s);
      REQUIRE(!acts.empty());
      std::set<std::string> uniq;
      for (const auto& a : acts) {
        CHECK(uniq.insert(a.text()).second);
        CHECK(parse_command(a.text()) == a);
      }
      const auto& a = rng.pick(acts);
      auto r = step(s, scene.task, a);
      CHECK(r.feedback != kNothingHappens);
      check_invariants(r.state);
      // Same input, same output.
      CHECK(step(s, scene.task, a).state == r.state);
      s = r.state;
    }
  }
}

TEST_CASE("observation entities are classified") {
  auto s = fixtures::rollout_state();
  const auto obs = render_observation(s, initial_feedback(s));
  CHECK(obs.has_listing);
  CHECK(obs.receptacles.size() == 12);
  CHECK(obs.objects.empty());
  auto t = fixtures::rollout_task();
  s = step(s, t, parse_command("go to countertop 1")).state;
  const auto o2 = render_observation(s, "On the countertop 1, you see a soapbar 2, and a soapbar 1.");
  CHECK(o2.objects == std::vector<std::string>{"soapbar 2", "soapbar 1"});
}

TEST_CASE("listing order is class ascending, index descending") {
  CHECK(listing_order({{"b", 1}, {"a", 1}, {"a", 2}}) == std::vector<std::string>{"a 2", "a 1", "b 1"});
}

TEST_CASE("scene generation") {
  SceneConfig cfg;
  const auto a = generate_scene(42, cfg);
  const auto b = generate_scene(42, cfg);
  CHECK(a.state == b.state);
  CHECK(a.task == b.task);
  CHECK(scene_from_line(scene_to_line(a)).state == a.state);
  CHECK(scene_from_line(scene_to_line(a)).task == a.task);
  // Variants redraw the task, never the room.
  CHECK(generate_scene(42, cfg, 3).state == a.state);
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const auto s = generate_scene(seed, cfg);
    CHECK(static_cast<int>(s.state.receptacles.size()) >= cfg.min_receptacles);
    CHECK_FALSE(goal_satisfied(s.state, s.task));
    for (std::size_t r = 0; r < s.state.receptacles.size(); ++r)
      CHECK(static_cast<int>(s.state.contents(static_cast<int>(r)).size()) <= cfg.max_objects_per_receptacle);
  }
  SceneConfig bad;
  bad.min_receptacles = 3;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

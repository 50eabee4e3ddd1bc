#include <sstream>

#include "doctest.h"
#include "fixtures.hpp"

#include "pet/engine.hpp"
#include "pet/expert.hpp"
#include "pet/harness/config.hpp"
#include "pet/harness/episode.hpp"
#include "pet/harness/evaluate.hpp"
#include "pet/harness/perturb.hpp"
#include "pet/harness/splits.hpp"
#include "pet/harness/trajectory.hpp"
#include "pet/lm/oracle.hpp"
#include "pet/scene.hpp"

using namespace pet;
using namespace pet::harness;

namespace {

Scene rollout_scene() {
  Scene s;
  s.seed = 5;
  s.state = fixtures::rollout_state();
  s.task = fixtures::rollout_task();
  return s;
}

Trajectory roundtrip(const Trajectory& t) {
  std::stringstream ss;
  write_trajectory(ss, t);
  return read_trajectory(ss);
}

}  // namespace

TEST_CASE("config parse, override and dump") {
  auto c = RunConfig::parse("[eval]\nseeds = 5\n[eliminate]\ntau_o = 0.3\n");
  CHECK(c.eval.seeds == 5);
  CHECK(c.eliminate.tau_o == 0.3);
  CHECK(c.eliminate.tau_r == 0.4);
  c.set("agent.layers", "3");
  CHECK(c.policy.layers == 3);
  CHECK_THROWS(c.set("agent.depth", "3"));
  CHECK_THROWS(c.set("eval.seeds", "many"));
  CHECK_THROWS(RunConfig::parse("[eval]\nsedes = 5\n"));
  CHECK_THROWS(RunConfig::parse("[nope]\nx = 1\n"));
  const auto again = RunConfig::parse(c.dump());
  CHECK(again.dump() == c.dump());
  CHECK(again.hash() == c.hash());
  CHECK(RunConfig{}.hash() != c.hash());
}

TEST_CASE("splits have the right sizes and novel combinations") {
  RunConfig c;
  c.splits.train = 30;
  c.splits.seen = 10;
  c.splits.unseen = 10;
  const auto s = build_splits(c.scene, c.splits);
  CHECK(s.train.size() == 30);
  CHECK(s.seen.size() == 10);
  CHECK(s.unseen.size() == 10);
  const auto trained = combos(s.train);
  std::set<std::uint64_t> train_seeds;
  for (const auto& x : s.train) train_seeds.insert(x.seed);
  for (const auto& x : s.seen) {
    CHECK(train_seeds.count(x.seed) == 1);
    CHECK(x.variant > 0);
    CHECK(trained.count(combo_of(x.task)) == 0);
  }
  for (const auto& x : s.unseen) {
    CHECK(train_seeds.count(x.seed) == 0);
    CHECK(trained.count(combo_of(x.task)) == 0);
  }
}

TEST_CASE("goal perturbation") {
  const std::string g = "heat some apple and put it in fridge";
  CHECK(perturb_goal(g, 1) == perturb_goal(g, 1));
  int changed = 0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto p = perturb_goal(g, s);
    changed += p != g;
    const auto parsed = Phrasebook::builtin().parse_goal(p, Catalog::builtin());
    REQUIRE(parsed);
    CHECK(parsed->type == TaskType::heat_and_place);
    CHECK(parsed->object_class == "apple");
    CHECK(parsed->receptacle_class == "fridge");
  }
  CHECK(changed == 20);
  const auto empty = Phrasebook::parse("{}");
  CHECK(perturb_goal(g, 1, empty) == g);
  CHECK(perturb_goal("do a backflip", 1) == "do a backflip");
}

TEST_CASE("scripted example rollout with the full pipeline") {
  const auto scene = rollout_scene();
  auto truth = std::make_shared<lm::EpisodeTruth>(lm::EpisodeTruth::from_scene(scene.state, scene.task));
  lm::OracleBackend o({0.0, 1, 64}, truth);
  EpisodeOptions opt;
  opt.flags = {false, true, true};
  std::vector<Action> script;
  for (const auto& c : fixtures::rollout_script()) script.push_back(parse_command(c));
  const auto t = run_episode(scene, o, truth.get(), scripted_agent(script), opt);
  CHECK(t.done);
  CHECK(t.steps.size() == fixtures::rollout_script().size());
  int inc = 0;
  for (const auto& s : t.steps) inc += s.tracker_incremented;
  CHECK(inc + (t.plan_finished ? 1 : 0) >= 4);
  CHECK(t.plan_finished);
  CHECK(t.final_subtask_index == 5);
  CHECK(t.steps.front().conditioning == "take a soapbar");
  CHECK(replay_mismatch(t).empty());
  const auto back = roundtrip(t);
  CHECK(back.steps.size() == t.steps.size());
  CHECK(back.steps.back().action == t.steps.back().action);
  CHECK(back.steps[3].fed == t.steps[3].fed);
  CHECK(back.plan_finished == t.plan_finished);
  CHECK(replay_mismatch(back).empty());

  auto tampered = back;
  tampered.steps[2].raw.text += " ";
  CHECK_FALSE(replay_mismatch(tampered).empty());
}

TEST_CASE("zero budget gives an empty episode") {
  const auto scene = generate_scene(3);
  lm::OracleBackend o({0.0, 1, 64});
  EpisodeOptions opt;
  opt.step_budget = 0;
  const auto t = run_episode(scene, o, nullptr, random_agent(1), opt);
  CHECK(t.steps.empty());
  CHECK_FALSE(t.done);
  CHECK(replay_mismatch(roundtrip(t)).empty());
}

TEST_CASE("pipeline modules never change transitions") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto scene = generate_scene(seed);
    const auto demo = solve(scene.state, scene.task);
    std::vector<Action> script;
    for (const auto& s : demo.steps) script.push_back(s.action);
    std::vector<std::string> raw_base;
    for (const auto& row : ablation_rows()) {
      if (row.flags.plan) continue;
      auto truth = std::make_shared<lm::EpisodeTruth>(lm::EpisodeTruth::from_scene(scene.state, scene.task));
      lm::OracleBackend o({0.0, 1, 64}, truth);
      EpisodeOptions opt;
      opt.flags = row.flags;
      const auto t = run_episode(scene, o, truth.get(), scripted_agent(script), opt);
      CHECK(t.done);
      std::vector<std::string> raw;
      for (const auto& s : t.steps) raw.push_back(s.raw.text);
      if (raw_base.empty())
        raw_base = raw;
      else
        CHECK(raw == raw_base);
    }
  }
}

TEST_CASE("report from re-read trajectories equals the live one") {
  RunConfig c;
  c.splits.train = 20;
  c.splits.seen = 6;
  c.splits.unseen = 2;
  c.eval.step_budget = 15;
  const auto s = build_splits(c.scene, c.splits);
  const auto factory = make_backend_factory(c.lm);
  auto embedder = factory(nullptr, 0);
  const auto bank = build_bank(s.train, *embedder);
  std::vector<Trajectory> live, reread;
  for (const auto& row : ablation_rows()) {
    SplitRun run{"seen", row.name, 0, nullptr, row.flags, &bank, 0.0};
    for (auto& t : run_split(s.seen, run, c, factory)) {
      CHECK(replay_mismatch(t).empty());
      reread.push_back(roundtrip(t));
      live.push_back(std::move(t));
    }
  }
  const auto a = report_from_trajectories(live, c.hash());
  const auto b = report_from_trajectories(reread, c.hash());
  CHECK(a.to_json() == b.to_json());
  REQUIRE(a.cell("pet", "seen") != nullptr);
  CHECK(a.cell("pet", "seen")->episodes == 6);
  CHECK(a.plan_accuracy.at("pet") == doctest::Approx(1.0));
  CHECK_THROWS(row_by_name("everything"));
  CHECK_THROWS(run_split({}, SplitRun{"seen", "base", 0, nullptr, {}, nullptr, 0.0}, c, factory));
}

TEST_CASE("parallel_for covers every index and rethrows") {
  std::vector<int> hit(50, 0);
  parallel_for(50, 4, [&](std::size_t i) { hit[i] += 1; });
  CHECK(std::count(hit.begin(), hit.end(), 1) == 50);
  CHECK_THROWS(parallel_for(10, 3, [](std::size_t i) {
    if (i == 7) throw std::runtime_error("x");
  }));
}

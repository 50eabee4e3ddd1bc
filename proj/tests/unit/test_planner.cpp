#include <algorithm>
#include <numeric>

#include "doctest.h"

#include "pet/expert.hpp"
#include "pet/lm/hash_embed.hpp"
#include "pet/lm/oracle.hpp"
#include "pet/planner.hpp"
#include "pet/rng.hpp"
#include "pet/scene.hpp"

using namespace pet;

namespace {

struct EmptyGen : lm::OracleBackend {
  EmptyGen() : lm::OracleBackend({0.0, 1, 64}) {}
  std::string generate(const std::string&, int, const std::vector<std::string>&) override { return " , \n "; }
};

ExampleBank small_bank(lm::Backend& b, int n) {
  ExampleBank bank;
  for (int i = 0; i < n; ++i) {
    const auto s = generate_scene(static_cast<std::uint64_t>(i));
    bank.add(s.task.goal_text, ground_truth_plan(s.task), b);
  }
  return bank;
}

}  // namespace

TEST_CASE("retrieval matches a full sort") {
  lm::OracleBackend o({0.0, 1, 64});
  const auto bank = small_bank(o, 60);
  CHECK_THROWS(retrieve_examples(bank, o.embed("x"), 61));
  Rng rng(3);
  const std::vector<std::string> words{"put", "heat", "apple", "mug", "cabinet", "fridge", "two", "clean", "lamp"};
  for (int q = 0; q < 200; ++q) {
    std::string text;
    for (int w = 0; w < 4; ++w) text += rng.pick(words) + " ";
    const auto v = o.embed(text);
    std::vector<std::size_t> idx(bank.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      return lm::cosine(v, bank.entries()[a].embedding) > lm::cosine(v, bank.entries()[b].embedding);
    });
    const auto got = retrieve_examples(bank, v, 5);
    REQUIRE(got.size() == 5);
    for (std::size_t k = 0; k < 5; ++k) CHECK(got[k] == &bank.entries()[idx[k]]);
  }
  const auto first = retrieve_examples(bank, bank.entries()[7].embedding, 5);
  CHECK(lm::cosine(first[0]->embedding, bank.entries()[7].embedding) == doctest::Approx(1.0));
}

TEST_CASE("prompt layout and round trip") {
  lm::OracleBackend o({0.0, 1, 64});
  ExampleBank bank;
  bank.add("put a clean spraybottle in toilet", {"take a spraybottle", "clean the spraybottle",
                                                 "place the spraybottle in/on toilet"}, o);
  const auto p = build_prompt({&bank.entries()[0]}, "heat some apple and put it in fridge");
  CHECK(p.find("What are the middle steps required to put a clean spraybottle in toilet?") != std::string::npos);
  CHECK(p.find("take a spraybottle, clean the spraybottle, place the spraybottle in/on toilet") != std::string::npos);
  CHECK(p.find("What are the middle steps required to heat some apple and put it in fridge?") != std::string::npos);
  CHECK_THROWS(build_prompt({}, "x"));

  const auto big = small_bank(o, 12);
  const auto ex = retrieve_examples(big, o.embed("put a mug in cabinet"), 5);
  const auto parsed = split_prompt(build_prompt(ex, "put a mug in cabinet"));
  REQUIRE(parsed.examples.size() == 5);
  CHECK(parsed.query == "put a mug in cabinet");
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(parsed.examples[i].first == ex[i]->task_text);
    CHECK(parse_plan_text(parsed.examples[i].second) == ex[i]->subtasks);
  }
}

TEST_CASE("plan parsing") {
  CHECK(parse_plan_text("chill the mug, return the mug to coffeemachine") ==
        std::vector<std::string>{"chill the mug", "return the mug to coffeemachine"});
  CHECK(parse_plan_text(" a ,\n b,,\n") == std::vector<std::string>{"a", "b"});
  CHECK(parse_plan_text("").empty());
  CHECK(parse_plan_text(std::string(300, 'x'))[0].size() == kMaxSubtaskChars);
  const std::vector<std::string> plan{"take a mug", "heat the mug", "place the mug in/on cabinet"};
  CHECK(parse_plan_text(render_plan(plan)) == plan);
  CHECK(parse_plan_text(render_plan(parse_plan_text(render_plan(plan)))) == plan);
}

TEST_CASE("generation with the oracle, and the fallback") {
  lm::OracleBackend o({0.0, 1, 64});
  const auto bank = small_bank(o, 10);
  const auto plan = generate_plan(o, bank, "heat some apple and put it in fridge");
  CHECK(plan.subtasks.size() == 3);
  CHECK(plan.source == PlanSource::generated);
  EmptyGen e;
  const auto fb = generate_plan(e, bank, "do the thing");
  CHECK(fb.subtasks == std::vector<std::string>{"do the thing"});
  CHECK(fb.source == PlanSource::fallback);
}

TEST_CASE("plan metrics") {
  lm::OracleBackend o({0.0, 1, 64});
  std::vector<std::vector<std::string>> gt, gen;
  for (int i = 0; i < 10; ++i) {
    const auto s = generate_scene(static_cast<std::uint64_t>(i));
    gt.push_back(ground_truth_plan(s.task));
  }
  gen = gt;
  auto m = evaluate_plans(gen, gt, o);
  CHECK(m.exact_accuracy == 1.0);
  CHECK(m.similarity == doctest::Approx(1.0));
  gen[0] = gt[0];
  for (auto& s : gen[0]) s = "x " + s;
  m = evaluate_plans(gen, gt, o);
  CHECK(m.exact_accuracy == doctest::Approx(0.9));
  CHECK(m.similarity > 0.9);
  CHECK_THROWS(evaluate_plans({gt[0]}, gt, o));
}

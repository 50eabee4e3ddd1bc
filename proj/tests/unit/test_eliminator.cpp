#include "doctest.h"
#include "fixtures.hpp"

#include "pet/eliminator.hpp"
#include "pet/engine.hpp"
#include "pet/lm/oracle.hpp"
#include "pet/rng.hpp"
#include "pet/scene.hpp"

using namespace pet;

namespace {

// Scores looked up by candidate name; throws on "boom".
struct TableScorer : lm::OracleBackend {
  std::map<std::string, double> table;
  double fallback = 0.0;
  TableScorer() : lm::OracleBackend({0.0, 1, 16}) {}
  double score_choice(const std::string&, const std::string& c) override {
    if (c.rfind("boom", 0) == 0) throw lm::BackendError("down", 503);
    auto it = table.find(c);
    return it == table.end() ? fallback : it->second;
  }
};

double brute_auc(const std::vector<double>& s, const std::vector<int>& l) {
  double num = 0, den = 0;
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = 0; j < s.size(); ++j)
      if (l[i] == 1 && l[j] == 0) {
        den += 1;
        num += s[i] > s[j] ? 1.0 : s[i] == s[j] ? 0.5 : 0.0;
      }
  return num / den;
}

}  // namespace

TEST_CASE("prompts are byte exact") {
  const auto [r, o] = relevance_prompts("heat some apple");
  CHECK(r == "Your task is to: heat some apple. Where should you go to?");
  CHECK(o == "Your task is to: heat some apple. Which objects will be relevant?");
  CHECK(relevance_prompts("").first == "Your task is to: . Where should you go to?");
}

TEST_CASE("threshold boundary keeps equality") {
  const auto s = fixtures::rollout_state();
  const auto obs = render_observation(s, initial_feedback(s));
  TableScorer sc;
  sc.table["cabinet 1"] = 0.40;
  sc.table["cabinet 2"] = 0.39;
  EliminatorConfig cfg;
  cfg.guard = false;
  const auto d = score_entities(sc, "take a soapbar", obs, cfg);
  REQUIRE(d.size() == obs.receptacles.size() + obs.objects.size());
  for (const auto& x : d) {
    if (x.entity == "cabinet 1") CHECK(x.kept);
    if (x.entity == "cabinet 2") CHECK_FALSE(x.kept);
    CHECK(x.kept == (x.score >= x.threshold || x.guarded));
  }
  const auto masked = mask_observation(obs, d);
  CHECK(masked.text == "Looking quickly around you, you see a cabinet 1.");
}

TEST_CASE("guard and fail-open") {
  const auto s = fixtures::rollout_state();
  const auto obs = render_observation(s, initial_feedback(s));
  TableScorer sc;
  auto d = score_entities(sc, "place the soapbar in/on cabinet", obs);
  for (const auto& x : d) CHECK(x.kept == (x.entity.rfind("cabinet", 0) == 0));

  struct Down : TableScorer {
    double score_choice(const std::string&, const std::string&) override { throw lm::BackendError("down", 500); }
  } down;
  d = score_entities(down, "x", obs);
  for (const auto& x : d) CHECK(x.kept);
  CHECK(mask_observation(obs, d) == obs);
}

TEST_CASE("masking properties on random observations") {
  Rng rng(9);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto scene = generate_scene(seed);
    WorldState st = scene.state;
    for (int k = 0; k < 3; ++k) st = step(st, scene.task, rng.pick(permissible_actions(st))).state;
    const auto obs = render_observation(st, "On the shelf 1, you see nothing.");
    const auto view = render_observation(st, initial_feedback(st));
    for (const auto& o : {obs, view}) {
      TableScorer sc;
      for (const auto& e : o.receptacles) sc.table[e] = rng.uniform();
      for (const auto& e : o.objects) sc.table[e] = rng.uniform();
      EliminatorConfig lo{0.2, 0.2, false}, hi{0.7, 0.7, false};
      const auto dl = score_entities(sc, "x", o, lo);
      const auto dh = score_entities(sc, "x", o, hi);
      CHECK(dl.size() == o.receptacles.size() + o.objects.size());
      const auto ml = mask_observation(o, dl);
      const auto mh = mask_observation(o, dh);
      // Raising the threshold never keeps more.
      for (const auto& e : mh.listed) CHECK(std::find(ml.listed.begin(), ml.listed.end(), e) != ml.listed.end());
      for (const auto& x : dh)
        if (!x.kept && o.preamble.find(x.entity) == std::string::npos) CHECK(mh.text.find(x.entity + ",") == std::string::npos);
      std::vector<MaskDecision> all = dl;
      for (auto& x : all) x.kept = true;
      CHECK(mask_observation(o, all) == o);
    }
  }
}

TEST_CASE("entity named in the feedback stays") {
  auto s = fixtures::rollout_state();
  const auto task = fixtures::rollout_task();
  s = step(s, task, parse_command("go to countertop 1")).state;
  auto r = step(s, task, parse_command("take soapbar 1 from countertop 1"));
  const auto obs = render_observation(r.state, r.feedback);
  TableScorer sc;
  EliminatorConfig cfg{0.4, 0.4, false};
  const auto m = mask_observation(obs, score_entities(sc, "x", obs, cfg));
  CHECK(m.text.find("soapbar 1") != std::string::npos);
  CHECK(m.text.find("countertop 1") != std::string::npos);
}

TEST_CASE("rank AUC equals the all-pairs count") {
  CHECK(evaluate_auc({0.9, 0.8, 0.1}, {1, 1, 0}) == 1.0);
  CHECK(evaluate_auc({0.5, 0.5}, {1, 0}) == 0.5);
  CHECK_THROWS_AS(evaluate_auc({0.1, 0.2}, {1, 1}), std::domain_error);
  Rng rng(4);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 2 + rng.below(60);
    std::vector<double> s(n);
    std::vector<int> l(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = static_cast<double>(rng.below(8)) / 8.0;  // many ties
      l[i] = static_cast<int>(rng.below(2));
    }
    l[0] = 1;
    l[1] = 0;
    CHECK(std::abs(evaluate_auc(s, l) - brute_auc(s, l)) < 1e-9);
  }
  const auto roc = roc_curve({0.9, 0.8, 0.1}, {1, 0, 0});
  CHECK(roc.front() == std::make_pair(0.0, 0.0));
  CHECK(roc.back() == std::make_pair(1.0, 1.0));
}

#include <atomic>
#include <cmath>
#include <filesystem>
#include <thread>

#include "doctest.h"
#include "fixtures.hpp"
#include "httplib.h"

#include "pet/eliminator.hpp"
#include "pet/engine.hpp"
#include "pet/lm/cache_backend.hpp"
#include "pet/lm/hash_embed.hpp"
#include "pet/lm/http_backend.hpp"
#include "pet/lm/oracle.hpp"
#include "pet/lm/truth.hpp"
#include "pet/planner.hpp"
#include "pet/scene.hpp"
#include "pet/tracker.hpp"

using namespace pet;
using namespace pet::lm;

namespace {

double norm(const Vec& v) {
  double n = 0;
  for (double x : v) n += x * x;
  return std::sqrt(n);
}

std::shared_ptr<EpisodeTruth> truth_for(const WorldState& s, const TaskSpec& t) {
  return std::make_shared<EpisodeTruth>(EpisodeTruth::from_scene(s, t));
}

// Canned server for the HTTP backend.
struct FakeServer {
  httplib::Server srv;
  std::thread th;
  int port = 0;
  std::atomic<int> hits{0};
  std::atomic<int> fail_first{0};
  int fail_status = 503;
  std::string body_override;

  FakeServer() {
    auto handle = [this](const std::string& body, httplib::Response& res) {
      ++hits;
      if (fail_first > 0) {
        --fail_first;
        res.status = fail_status;
        return;
      }
      if (!body_override.empty()) {
        res.set_content(body_override, "application/json");
        return;
      }
      res.set_content(body, "application/json");
    };
    srv.Post("/v1/generate", [handle](const httplib::Request& req, httplib::Response& res) {
      const auto j = nlohmann::json::parse(req.body);
      handle(nlohmann::json{{"text", "echo: " + j["prompt"].get<std::string>() + "\n\nmore"}}.dump(), res);
    });
    srv.Post("/v1/logprobs", [handle](const httplib::Request& req, httplib::Response& res) {
      const auto auth = req.get_header_value("Authorization");
      const double yes = auth == "Bearer sekrit" ? std::log(0.75) : std::log(0.25);
      handle(nlohmann::json{{"logprobs", {{"Yes", yes}, {"No", std::log(0.25)}}}}.dump(), res);
    });
    srv.Post("/v1/embed", [handle](const httplib::Request&, httplib::Response& res) {
      handle(nlohmann::json{{"embedding", {3.0, 4.0}}}.dump(), res);
    });
    port = srv.bind_to_any_port("127.0.0.1");
    th = std::thread([this] { srv.listen_after_bind(); });
    srv.wait_until_ready();
  }
  ~FakeServer() {
    srv.stop();
    th.join();
  }
  HttpConfig config() const {
    HttpConfig c;
    c.endpoint = "http://127.0.0.1:" + std::to_string(port) + "/v1";
    c.backoff_ms = 1;
    c.timeout_ms = 2000;
    return c;
  }
};

}  // namespace

TEST_CASE("hash embeddings are unit length and deterministic") {
  for (const char* t : {"", "a", "heat some apple and put it in fridge", "!!!"}) {
    const auto v = hash_embed(t, 64);
    CHECK(v.size() == 64);
    CHECK(norm(v) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(v == hash_embed(t, 64));
  }
  CHECK(cosine(hash_embed("take a cup"), hash_embed("take a cup")) == doctest::Approx(1.0));
  CHECK(cosine(hash_embed("take a cup"), hash_embed("take a glass")) < 0.95);
  CHECK(cosine(lexical_embed("take a cup"), lexical_embed("take a glass")) == doctest::Approx(1.0));
  CHECK(cosine(lexical_embed("cool a cup"), lexical_embed("chill a cup")) < 0.95);
  CHECK_THROWS(hash_embed("x", 0));
}

TEST_CASE("yes/no from log-probabilities renormalizes") {
  const auto yn = yes_no_from_logprobs(std::log(0.3), std::log(0.1));
  CHECK(yn.p_yes == doctest::Approx(0.75));
  CHECK(yn.p_yes + yn.p_no == doctest::Approx(1.0));
  const auto extreme = yes_no_from_logprobs(-1000, -2000);
  CHECK(extreme.p_yes == doctest::Approx(1.0));
  CHECK(truncate_at_stop("a, b\n\nc", {"\n\n"}) == "a, b");
  CHECK(truncate_at_stop("abc", {}) == "abc");
}

TEST_CASE("oracle generation follows the decomposition") {
  OracleBackend o({0.0, 1, 64});
  const auto text = o.generate("What are the middle steps required to heat some apple and put it in fridge?\n", 64, {});
  CHECK(text == "take an apple, heat the apple, place the apple in/on fridge");
  CHECK(o.generate("no question here", 64, {}).empty());
  // Nouns are echoed the way the query wrote them.
  CHECK(o.generate("What are the middle steps required to chill a glass and place it in the cupboard?", 64, {}) ==
        "take a glass, cool the glass, place the glass in/on cupboard");
}

TEST_CASE("oracle relevance: microwave in, coffeemachine out") {
  auto scene = generate_scene(0);
  // Find a kitchen with both appliances.
  for (std::uint64_t s = 0; s < 400; ++s) {
    scene = generate_scene(s);
    if (scene.state.room == "kitchen" && scene.state.find_receptacle("coffeemachine 1") >= 0 &&
        scene.state.find_receptacle("microwave 1") >= 0 && scene.state.find_receptacle("garbagecan 1") >= 0)
      break;
  }
  REQUIRE(scene.state.room == "kitchen");
  TaskSpec t{TaskType::heat_and_place, "apple", "countertop", "", 0};
  t.goal_text = Phrasebook::builtin().goal_text(t.type, t.object_class, t.receptacle_class);
  WorldState st = scene.state;
  if (st.receptacles_of("countertop").empty()) return;
  // Make sure an apple exists somewhere.
  bool has_apple = false;
  for (const auto& ob : st.objects) has_apple = has_apple || ob.cls == "apple";
  if (!has_apple) st.objects.push_back({"apple", 1, Catalog::builtin().object("apple")->flags, 0, false, false, false});
  auto truth = truth_for(st, t);
  REQUIRE(truth->demo.solved);
  OracleBackend o({0.0, 1, 64}, truth);
  const auto [rp, op] = relevance_prompts("heat some apple");
  CHECK(o.score_choice(relevance_prompts("heat the apple").first, "microwave 1") == 1.0);
  CHECK(o.score_choice(relevance_prompts("heat the apple").first, "coffeemachine 1") == 0.0);
  CHECK(o.score_choice(relevance_prompts(t.goal_text).first, "garbagecan 1") == 0.0);
  CHECK(o.score_choice("unparseable", "microwave 1") == 0.5);
  (void)rp;
  (void)op;
}

TEST_CASE("oracle yes/no tracks world predicates") {
  const auto s0 = fixtures::rollout_state();
  const auto task = fixtures::rollout_task();
  auto truth = truth_for(s0, task);
  OracleBackend o({0.0, 1, 64}, truth);
  auto ask = [&](const std::string& sub) { return o.yes_no("Did you finish the task of " + sub + "?"); };
  CHECK(ask("take a soapbar").p_no == 1.0);
  truth->state = step(step(s0, task, parse_command("go to countertop 1")).state, task,
                      parse_command("take soapbar 1 from countertop 1"))
                     .state;
  CHECK(ask("take a soapbar").p_yes == 1.0);
  CHECK(ask("place the soapbar in/on cabinet").p_yes == 0.0);
  const auto yn = o.yes_no("garbage");
  CHECK(yn.p_yes == 0.5);
}

TEST_CASE("oracle noise is miss-only for yes/no") {
  auto s = fixtures::rollout_state();
  const auto task = fixtures::rollout_task();
  auto truth = truth_for(s, task);
  OracleBackend o({0.3, 5, 64}, truth);
  int yes = 0;
  for (int i = 0; i < 400; ++i) yes += o.yes_no("Did you finish the task of take a soapbar?").p_yes > 0.5;
  CHECK(yes == 0);
  truth->state = step(step(s, task, parse_command("go to countertop 1")).state, task,
                      parse_command("take soapbar 1 from countertop 1"))
                     .state;
  for (int i = 0; i < 1000; ++i) yes += o.yes_no("Did you finish the task of take a soapbar?").p_yes > 0.5;
  CHECK(yes == doctest::Approx(700).epsilon(0.1));
}

TEST_CASE("http backend: calls, auth, retries and errors") {
  FakeServer server;
  auto cfg = server.config();
  cfg.token = "sekrit";
  HttpBackend b(cfg);
  CHECK(b.generate("hi", 8, {"\n\n"}) == "echo: hi");
  CHECK(b.yes_no("q").p_yes == doctest::Approx(0.75));
  const auto v = b.embed("x");
  CHECK(v[0] == doctest::Approx(0.6));
  CHECK(v[1] == doctest::Approx(0.8));

  server.fail_first = 2;
  const long before = b.attempts();
  CHECK(b.yes_no("q").p_yes == doctest::Approx(0.75));
  CHECK(b.attempts() - before == 3);

  server.fail_first = 5;
  try {
    b.yes_no("q");
    FAIL("expected an error");
  } catch (const BackendError& e) {
    CHECK(e.status() == 503);
  }
  server.fail_first = 0;

  server.fail_status = 401;
  server.fail_first = 1;
  const long before4 = b.attempts();
  CHECK_THROWS_AS(b.yes_no("q"), BackendError);
  CHECK(b.attempts() - before4 == 1);
  server.fail_status = 503;

  server.body_override = "{not json";
  CHECK_THROWS_AS(b.generate("x", 1, {}), ProtocolError);
  server.body_override = R"({"unexpected": 1})";
  CHECK_THROWS_AS(b.embed("x"), ProtocolError);
  server.body_override.clear();

  HttpConfig nowhere;
  nowhere.endpoint = "http://127.0.0.1:1";
  nowhere.retries = 1;
  nowhere.backoff_ms = 1;
  nowhere.timeout_ms = 200;
  HttpBackend dead(nowhere);
  CHECK_THROWS_AS(dead.embed("x"), BackendError);
  CHECK(dead.attempts() == 2);
}

TEST_CASE("cache backend records then replays") {
  const auto path = std::filesystem::temp_directory_path() / "pet_cache_test.jsonl";
  std::filesystem::remove(path);
  auto inner = std::make_shared<OracleBackend>(OracleConfig{0.0, 1, 16});
  const std::string q = "What are the middle steps required to put a mug in cabinet?";
  {
    CacheBackend rec(inner, path, CacheMode::record);
    CHECK(rec.generate(q, 32, {}) == "take a mug, place the mug in/on cabinet");
    CHECK(rec.embed("hello") == inner->embed("hello"));
    rec.yes_no("x");
    rec.score_choice("p", "c");
    CHECK(rec.size() == 4);
    rec.embed("hello");
    CHECK(rec.size() == 4);
  }
  CacheBackend rep(nullptr, path, CacheMode::replay);
  CHECK(rep.size() == 4);
  CHECK(rep.generate(q, 32, {}) == "take a mug, place the mug in/on cabinet");
  CHECK(rep.embed("hello") == inner->embed("hello"));
  CHECK_THROWS_AS(rep.embed("never seen"), CacheMiss);
  CHECK(CacheBackend::make_key("embed", {{"text", "a"}}) == CacheBackend::make_key("embed", {{"text", "a"}}));
  CHECK(CacheBackend::make_key("embed", {{"text", "a"}}) != CacheBackend::make_key("embed", {{"text", "b"}}));
  std::filesystem::remove(path);
}

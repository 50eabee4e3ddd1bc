#include <set>
#include <sstream>

#include "doctest.h"

#include "pet/catalog.hpp"
#include "pet/phrasebook.hpp"
#include "pet/rng.hpp"
#include "pet/task.hpp"
#include "pet/text.hpp"

using namespace pet;

TEST_CASE("text helpers") {
  CHECK(trim("  a b \n") == "a b");
  CHECK(collapse_spaces("a   b\t c") == "a b c");
  CHECK(split_any("a,,b\nc", ",\n") == std::vector<std::string>{"a", "", "b", "c"});
  CHECK(tokenize("Put a Coffee-Mug, in/on it.") ==
        std::vector<std::string>{"put", "a", "coffee", "mug", "in", "on", "it"});
  CHECK(contains_token("the mug 1 is here", "mug"));
  CHECK_FALSE(contains_token("the mugs", "mug"));
  CHECK(find_entity_names("On the countertop 1, you see a soapbar 2, and a cloth 10.") ==
        std::vector<std::string>{"countertop 1", "soapbar 2", "cloth 10"});
  CHECK(listing_phrase({}) == "nothing");
  CHECK(listing_phrase({"a 1"}) == "a a 1");
  CHECK(listing_phrase({"x 1", "y 2", "z 3"}) == "a x 1, a y 2, and a z 3");
  CHECK(fill("{o} in {r}, {o}", "o", "mug") == "mug in {r}, mug");
  CHECK(hex64(255) == "00000000000000ff");
}

TEST_CASE("rng draws are portable and bounded") {
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) {
    const auto x = a.below(7);
    CHECK(x == b.below(7));
    CHECK(x < 7);
    const int y = a.between(-2, 2);
    b.between(-2, 2);
    CHECK((y >= -2 && y <= 2));
    const double u = a.uniform();
    b.uniform();
    CHECK((u >= 0.0 && u < 1.0));
  }
  CHECK(mix_seed(1, 2) != mix_seed(2, 1));
  CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("builtin catalog is consistent") {
  const auto& c = Catalog::builtin();
  CHECK(c.receptacle("cabinet") != nullptr);
  CHECK(c.receptacle("cabinet")->flags.has(Affordance::openable));
  CHECK(c.object("apple") != nullptr);
  CHECK(c.object("apple")->flags.has(Affordance::pickupable));
  CHECK(c.object("cabinet") == nullptr);
  for (const auto& o : c.objects()) {
    for (const auto& r : o.likely) CHECK(c.receptacle(r) != nullptr);
    for (const auto& room : o.rooms) CHECK(c.room(room) != nullptr);
  }
  CHECK(affordance_from_string(to_string(Affordance::cool_source)) == Affordance::cool_source);
  CHECK_THROWS_AS(affordance_from_string("sticky"), CatalogError);
}

TEST_CASE("catalog errors name the problem") {
  auto bad = [](const std::string& text) {
    std::istringstream in(text);
    try {
      Catalog::parse(in, "t.ini");
    } catch (const CatalogError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(bad("[thing]\nflags =\n").find("kind prefix") != std::string::npos);
  CHECK(bad("[widget:x]\nflags =\n").find("unknown record kind") != std::string::npos);
  CHECK(bad("[receptacle:box]\nflags = pickupable\n").find("cannot be pickupable") != std::string::npos);
  CHECK(bad("[receptacle:box]\nflags = wobbly\n").find("unknown affordance") != std::string::npos);
  CHECK(bad("[receptacle:box]\nflags =\n[object:pen]\nflags = pickupable\nlikely = shelf\n")
            .find("unknown receptacle 'shelf'") != std::string::npos);
  CHECK_THROWS_AS(Catalog::load("/nonexistent/catalog.ini"), CatalogError);
}

TEST_CASE("goal templates and paraphrases parse back") {
  const auto& pb = Phrasebook::builtin();
  const auto& cat = Catalog::builtin();
  CHECK(pb.goal_text(TaskType::pick_two_and_place, "soapbar", "cabinet") == "put two soapbars in cabinet");
  for (auto type : kAllTaskTypes) {
    const std::string r = type == TaskType::examine_in_light ? "desklamp" : "cabinet";
    const auto g = pb.parse_goal(pb.goal_text(type, "mug", r), cat);
    REQUIRE(g);
    CHECK(g->type == type);
    CHECK(g->object_class == "mug");
    CHECK(g->receptacle_class == r);
    for (const auto& frame : pb.goal_paraphrases(type)) {
      const auto text = fill(fill(frame, "o", "coffee mug"), "r", r);
      const auto p = pb.parse_goal(text, cat);
      REQUIRE_MESSAGE(p, text);
      CHECK(p->type == type);
      CHECK(p->object_class == "mug");
      CHECK(p->object_phrase == "coffee mug");
    }
  }
  CHECK_FALSE(pb.parse_goal("juggle three mugs", cat));
}

TEST_CASE("sub-task strings parse back") {
  const auto& pb = Phrasebook::builtin();
  const auto& cat = Catalog::builtin();
  const std::vector<SubTask> all{{SubTaskKind::take, "apple", ""},   {SubTaskKind::heat, "apple", ""},
                                 {SubTaskKind::cool, "apple", ""},   {SubTaskKind::clean, "apple", ""},
                                 {SubTaskKind::place, "apple", "fridge"}, {SubTaskKind::examine, "book", "desklamp"}};
  for (const auto& s : all) {
    const auto text = pb.subtask_text(s);
    const auto back = pb.parse_subtask(text, cat);
    REQUIRE_MESSAGE(back, text);
    CHECK(*back == s);
  }
  CHECK(pb.subtask_text(all[4]) == "place the apple in/on fridge");
}

TEST_CASE("noun resolution and canonical nouns") {
  const auto& pb = Phrasebook::builtin();
  const auto& cat = Catalog::builtin();
  CHECK(pb.resolve_noun("the coffee mug", cat) == std::optional<std::string>("mug"));
  CHECK(pb.resolve_noun("spraybottles", cat) == std::optional<std::string>("spraybottle"));
  CHECK_FALSE(pb.resolve_noun("unicorn", cat));
  CHECK(pb.canonical_nouns("take a coffee mug") == "take a mug");
  CHECK(pb.canonical_nouns("place the bar of soap in the cabinet") == "place the soapbar in the cabinet");
  CHECK(pb.canonical_nouns("take a glass", {"cup"}) == "take a cup");
  CHECK(normalize_phrase("  Put  A Mug. ") == "put a mug");
}

TEST_CASE("phrasebook rejects malformed data") {
  CHECK_THROWS(Phrasebook::parse("{"));
  CHECK_THROWS(Phrasebook::parse("[]"));
}

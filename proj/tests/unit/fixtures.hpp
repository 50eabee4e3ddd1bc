#pragma once

#include <string>
#include <vector>

#include "pet/catalog.hpp"
#include "pet/phrasebook.hpp"
#include "pet/task.hpp"
#include "pet/world.hpp"

namespace fixtures {

// The bathroom of the example rollout: two soapbars on the countertop, a
// cloth in cabinet 1.
inline pet::WorldState rollout_state() {
  const auto& cat = pet::Catalog::builtin();
  pet::WorldState s;
  s.room = "bathroom";
  auto add_r = [&](const std::string& cls, int idx) {
    s.receptacles.push_back({cls, idx, cat.receptacle(cls)->flags, false, false});
  };
  for (int i = 1; i <= 4; ++i) add_r("cabinet", i);
  add_r("countertop", 1);
  add_r("garbagecan", 1);
  add_r("handtowelholder", 1);
  add_r("handtowelholder", 2);
  add_r("sinkbasin", 1);
  add_r("sinkbasin", 2);
  add_r("toilet", 1);
  add_r("towelholder", 1);
  auto add_o = [&](const std::string& cls, int idx, int loc) {
    s.objects.push_back({cls, idx, cat.object(cls)->flags, loc, false, false, false});
  };
  add_o("cloth", 1, 0);
  add_o("soapbar", 1, 4);
  add_o("soapbar", 2, 4);
  return s;
}

inline pet::TaskSpec rollout_task() {
  pet::TaskSpec t{pet::TaskType::pick_two_and_place, "soapbar", "cabinet", "", 0};
  t.goal_text = pet::Phrasebook::builtin().goal_text(t.type, t.object_class, t.receptacle_class);
  return t;
}

// The action sequence of the example rollout.
inline std::vector<std::string> rollout_script() {
  return {"go to toilet 1",        "go to sinkbasin 1",       "go to sinkbasin 2",
          "go to garbagecan 1",    "go to countertop 1",      "take soapbar 1 from countertop 1",
          "go to cabinet 1",       "open cabinet 1",          "put soapbar 1 in/on cabinet 1",
          "close cabinet 1",       "go to countertop 1",      "take soapbar 2 from countertop 1",
          "go to cabinet 1",       "open cabinet 1",          "put soapbar 2 in/on cabinet 1"};
}

}  // namespace fixtures

#include "pet/json_io.hpp"

#include <stdexcept>

namespace pet {

namespace {

std::string_view view_name(View v) {
  switch (v) {
    case View::none: return "none";
    case View::room: return "room";
    case View::location: return "location";
  }
  return "none";
}

View view_from(const std::string& s) {
  if (s == "room") return View::room;
  if (s == "location") return View::location;
  if (s == "none") return View::none;
  throw std::runtime_error("unknown view '" + s + "'");
}

}  // namespace

void to_json(json& j, const TaskSpec& t) {
  j = json{{"type", std::string(to_string(t.type))},
           {"object", t.object_class},
           {"receptacle", t.receptacle_class},
           {"goal_text", t.goal_text},
           {"scene_seed", t.scene_seed}};
}

void from_json(const json& j, TaskSpec& t) {
  const auto type = task_type_from_string(j.at("type").get<std::string>());
  if (!type) throw std::runtime_error("unknown task type " + j.at("type").dump());
  t.type = *type;
  t.object_class = j.at("object").get<std::string>();
  t.receptacle_class = j.at("receptacle").get<std::string>();
  t.goal_text = j.at("goal_text").get<std::string>();
  t.scene_seed = j.at("scene_seed").get<std::uint64_t>();
}

void to_json(json& j, const ReceptacleInstance& r) {
  j = json{{"cls", r.cls}, {"index", r.index}, {"flags", r.flags.bits()}, {"open", r.open}, {"lit", r.lit}};
}

void from_json(const json& j, ReceptacleInstance& r) {
  r.cls = j.at("cls").get<std::string>();
  r.index = j.at("index").get<int>();
  r.flags = Affordances::from_bits(j.at("flags").get<std::uint16_t>());
  r.open = j.at("open").get<bool>();
  r.lit = j.at("lit").get<bool>();
}

void to_json(json& j, const ObjectInstance& o) {
  j = json{{"cls", o.cls},         {"index", o.index},     {"flags", o.flags.bits()}, {"location", o.location},
           {"heated", o.heated}, {"cooled", o.cooled}, {"cleaned", o.cleaned}};
}

void from_json(const json& j, ObjectInstance& o) {
  o.cls = j.at("cls").get<std::string>();
  o.index = j.at("index").get<int>();
  o.flags = Affordances::from_bits(j.at("flags").get<std::uint16_t>());
  o.location = j.at("location").get<int>();
  o.heated = j.at("heated").get<bool>();
  o.cooled = j.at("cooled").get<bool>();
  o.cleaned = j.at("cleaned").get<bool>();
}

void to_json(json& j, const WorldState& s) {
  j = json{{"room", s.room},         {"receptacles", s.receptacles},
           {"objects", s.objects},   {"agent_at", s.agent_at},
           {"step_count", s.step_count}, {"view", std::string(view_name(s.view))}};
}

void from_json(const json& j, WorldState& s) {
  s.room = j.at("room").get<std::string>();
  s.receptacles = j.at("receptacles").get<std::vector<ReceptacleInstance>>();
  s.objects = j.at("objects").get<std::vector<ObjectInstance>>();
  s.agent_at = j.at("agent_at").get<int>();
  s.step_count = j.at("step_count").get<int>();
  s.view = view_from(j.at("view").get<std::string>());
  check_invariants(s);
}

void to_json(json& j, const Observation& o) {
  j = json{{"preamble", o.preamble},       {"has_listing", o.has_listing}, {"listed", o.listed},
           {"receptacles", o.receptacles}, {"objects", o.objects},         {"text", o.text}};
}

void from_json(const json& j, Observation& o) {
  o.preamble = j.at("preamble").get<std::string>();
  o.has_listing = j.at("has_listing").get<bool>();
  o.listed = j.at("listed").get<std::vector<std::string>>();
  o.receptacles = j.at("receptacles").get<std::vector<std::string>>();
  o.objects = j.at("objects").get<std::vector<std::string>>();
  o.text = j.at("text").get<std::string>();
}

}  // namespace pet

#include "pet/engine.hpp"

#include "pet/text.hpp"

namespace pet {

namespace {

constexpr std::string_view kYouSee = "you see";

std::vector<std::string> room_listing(const WorldState& s) {
  std::vector<std::pair<std::string, int>> e;
  for (const auto& r : s.receptacles) e.emplace_back(r.cls, r.index);
  return listing_order(std::move(e));
}

std::vector<std::string> contents_listing(const WorldState& s, int r) {
  std::vector<std::pair<std::string, int>> e;
  for (int id : s.contents(r)) e.emplace_back(s.objects[id].cls, s.objects[id].index);
  return listing_order(std::move(e));
}

std::vector<std::string> current_listing(const WorldState& s) {
  if (s.view == View::room) return room_listing(s);
  if (s.view == View::location && s.agent_at != kStart) return contents_listing(s, s.agent_at);
  return {};
}

// Text shown when arriving at (or looking around) receptacle `r`; sets view.
std::string describe_location(WorldState& s, int r) {
  const auto& rec = s.receptacles[r];
  const std::string n = rec.name();
  if (rec.flags.has(Affordance::light_source)) {
    s.view = View::none;
    return "The " + n + " is " + (rec.lit ? "on." : "off.");
  }
  if (rec.openable() && !rec.open) {
    s.view = View::none;
    return "The " + n + " is closed.";
  }
  s.view = View::location;
  const std::string lead = rec.openable() ? "The " + n + " is open. In it, " : "On the " + n + ", ";
  return compose_observation(s, lead + std::string(kYouSee), true, contents_listing(s, r)).text;
}

bool holds(const WorldState& s, std::string_view name, int& id) {
  id = s.find_object(name);
  return id >= 0 && s.objects[id].location == kInventory;
}

}  // namespace

Observation compose_observation(const WorldState& state, std::string preamble, bool has_listing,
                                std::vector<std::string> listed) {
  Observation o;
  o.preamble = std::move(preamble);
  o.has_listing = has_listing;
  o.listed = has_listing ? std::move(listed) : std::vector<std::string>{};
  o.text = has_listing ? o.preamble + " " + listing_phrase(o.listed) + "." : o.preamble;
  for (const auto& name : find_entity_names(o.text)) {
    if (state.find_receptacle(name) >= 0)
      o.receptacles.push_back(name);
    else if (state.find_object(name) >= 0)
      o.objects.push_back(name);
  }
  return o;
}

std::string initial_feedback(const WorldState& state) {
  return compose_observation(state, "Looking quickly around you, " + std::string(kYouSee), true, room_listing(state))
      .text;
}

Observation render_observation(const WorldState& state, std::string_view feedback) {
  if (state.view != View::none) {
    const auto pos = feedback.rfind(kYouSee);
    if (pos != std::string_view::npos)
      return compose_observation(state, std::string(feedback.substr(0, pos + kYouSee.size())), true,
                                 current_listing(state));
  }
  return compose_observation(state, std::string(feedback), false, {});
}

std::vector<Action> permissible_actions(const WorldState& s) {
  std::vector<Action> out;
  for (int r = 0; r < static_cast<int>(s.receptacles.size()); ++r)
    if (r != s.agent_at) out.push_back({Verb::go_to, "", s.receptacles[r].name()});

  if (s.agent_at != kStart) {
    const auto& rec = s.receptacles[s.agent_at];
    const std::string rn = rec.name();
    if (rec.openable()) out.push_back({rec.open ? Verb::close : Verb::open, "", rn});
    const auto held = s.held();
    if (rec.accessible() && !held)
      for (const auto& on : contents_listing(s, s.agent_at)) out.push_back({Verb::take, on, rn});
    if (held) {
      const std::string hn = s.objects[*held].name();
      if (rec.accessible() && !rec.flags.has(Affordance::light_source)) out.push_back({Verb::put, hn, rn});
      if (rec.flags.has(Affordance::heat_source)) out.push_back({Verb::heat, hn, rn});
      if (rec.flags.has(Affordance::cool_source)) out.push_back({Verb::cool, hn, rn});
      if (rec.flags.has(Affordance::clean_source)) out.push_back({Verb::clean, hn, rn});
    }
    if (rec.flags.has(Affordance::light_source)) out.push_back({Verb::use, "", rn});
  }
  out.push_back({Verb::look, "", ""});
  return out;
}

bool is_permissible(const WorldState& state, const Action& action) {
  for (const auto& a : permissible_actions(state))
    if (a == action) return true;
  return false;
}

StepResult step(const WorldState& state, const TaskSpec& task, const Action& action) {
  if (!is_permissible(state, action)) return {state, std::string(kNothingHappens), goal_satisfied(state, task)};

  WorldState s = state;
  s.step_count += 1;
  std::string fb;
  const int r = action.receptacle.empty() ? -1 : s.find_receptacle(action.receptacle);
  int o = -1;

  switch (action.verb) {
    case Verb::go_to:
      s.agent_at = r;
      fb = describe_location(s, r);
      break;
    case Verb::open:
      s.receptacles[r].open = true;
      fb = describe_location(s, r);
      break;
    case Verb::close:
      s.receptacles[r].open = false;
      s.view = View::none;
      fb = "You close the " + action.receptacle + ".";
      break;
    case Verb::take:
      o = s.find_object(action.object);
      s.objects[o].location = kInventory;
      s.view = View::none;
      fb = "You pick up the " + action.object + " from the " + action.receptacle + ".";
      break;
    case Verb::put:
      holds(s, action.object, o);
      s.objects[o].location = r;
      s.view = View::none;
      fb = "You put the " + action.object + " in/on the " + action.receptacle + ".";
      break;
    case Verb::heat:
      holds(s, action.object, o);
      s.objects[o].heated = true;
      s.objects[o].cooled = false;
      s.view = View::none;
      fb = "You heat the " + action.object + " using the " + action.receptacle + ".";
      break;
    case Verb::cool:
      holds(s, action.object, o);
      s.objects[o].cooled = true;
      s.objects[o].heated = false;
      s.view = View::none;
      fb = "You cool the " + action.object + " using the " + action.receptacle + ".";
      break;
    case Verb::clean:
      holds(s, action.object, o);
      s.objects[o].cleaned = true;
      s.view = View::none;
      fb = "You clean the " + action.object + " using the " + action.receptacle + ".";
      break;
    case Verb::use:
      s.receptacles[r].lit = true;
      s.view = View::none;
      fb = "You turn on the " + action.receptacle + ".";
      break;
    case Verb::look:
      if (s.agent_at == kStart) {
        s.view = View::room;
        fb = initial_feedback(s);
      } else {
        fb = describe_location(s, s.agent_at);
      }
      break;
  }
  const bool done = goal_satisfied(s, task);
  return {std::move(s), std::move(fb), done};
}

namespace {

bool in_class(const WorldState& s, int loc, std::string_view cls) {
  return loc >= 0 && s.receptacles[loc].cls == cls;
}

}  // namespace

bool goal_satisfied(const WorldState& s, const TaskSpec& task) {
  const auto& X = task.object_class;
  const auto& R = task.receptacle_class;
  switch (task.type) {
    case TaskType::pick_and_place:
      for (const auto& o : s.objects)
        if (o.cls == X && in_class(s, o.location, R)) return true;
      return false;
    case TaskType::pick_two_and_place:
      for (int r : s.receptacles_of(R)) {
        int n = 0;
        for (int id : s.contents(r)) n += s.objects[id].cls == X;
        if (n >= 2) return true;
      }
      return false;
    case TaskType::heat_and_place:
    case TaskType::cool_and_place:
    case TaskType::clean_and_place:
      for (const auto& o : s.objects) {
        const bool cond = task.type == TaskType::heat_and_place   ? o.heated
                          : task.type == TaskType::cool_and_place ? o.cooled
                                                                  : o.cleaned;
        if (o.cls == X && cond && in_class(s, o.location, R)) return true;
      }
      return false;
    case TaskType::examine_in_light: {
      const auto held = s.held();
      if (!held || s.objects[*held].cls != X || s.agent_at == kStart) return false;
      const auto& here = s.receptacles[s.agent_at];
      return here.cls == R && here.flags.has(Affordance::light_source) && here.lit;
    }
  }
  return false;
}

bool subtask_satisfied(const WorldState& s, const SubTask& st, int ordinal) {
  const auto& X = st.object_class;
  switch (st.kind) {
    case SubTaskKind::take: {
      const auto held = s.held();
      return held && s.objects[*held].cls == X;
    }
    case SubTaskKind::heat:
    case SubTaskKind::cool:
    case SubTaskKind::clean:
      for (const auto& o : s.objects) {
        const bool cond = st.kind == SubTaskKind::heat ? o.heated : st.kind == SubTaskKind::cool ? o.cooled : o.cleaned;
        if (o.cls == X && cond) return true;
      }
      return false;
    case SubTaskKind::place:
      for (int r : s.receptacles_of(st.receptacle_class)) {
        int n = 0;
        for (int id : s.contents(r)) n += s.objects[id].cls == X;
        if (n >= ordinal) return true;
      }
      return false;
    case SubTaskKind::examine: {
      TaskSpec t;
      t.type = TaskType::examine_in_light;
      t.object_class = X;
      t.receptacle_class = st.receptacle_class;
      return goal_satisfied(s, t);
    }
  }
  return false;
}

}  // namespace pet

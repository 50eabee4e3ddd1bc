#include "pet/expert.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace pet {

std::vector<std::string> ground_truth_plan(const TaskSpec& task, const Phrasebook& pb) {
  std::vector<std::string> out;
  for (const auto& s : decompose(task)) out.push_back(pb.subtask_text(s));
  return out;
}

std::vector<int> search_order(const WorldState& s, const Catalog& catalog, std::string_view object_class) {
  const ObjectClass* oc = catalog.object(object_class);
  std::vector<int> ids;
  for (int r = 0; r < static_cast<int>(s.receptacles.size()); ++r)
    if (!s.receptacles[r].flags.has(Affordance::light_source)) ids.push_back(r);

  auto tier = [&](int r) -> std::size_t {
    const auto& rec = s.receptacles[r];
    if (oc) {
      const auto rank = oc->likelihood_rank(rec.cls);
      if (rank < oc->likely.size()) return rank;
    }
    const std::size_t base = oc ? oc->likely.size() : 0;
    return rec.openable() ? base : base + 1;
  };
  std::stable_sort(ids.begin(), ids.end(), [&](int a, int b) {
    const auto ta = tier(a), tb = tier(b);
    if (ta != tb) return ta < tb;
    const auto& ra = s.receptacles[a];
    const auto& rb = s.receptacles[b];
    if (ra.cls != rb.cls) return ra.cls < rb.cls;
    return ra.index < rb.index;
  });
  return ids;
}

namespace {

struct BudgetExhausted {};

class Runner {
 public:
  Runner(const WorldState& start, const TaskSpec& task, const Catalog& catalog, const ExpertOptions& opt,
         const Phrasebook& pb)
      : state_(start), task_(task), catalog_(catalog), opt_(opt) {
    demo_.task = task;
    demo_.initial = start;
    structured_ = decompose(task);
    demo_.subtask_plan = ground_truth_plan(task, pb);
    int places = 0;
    for (const auto& st : structured_) ordinals_.push_back(st.kind == SubTaskKind::place ? ++places : 1);
    obs_ = render_observation(state_, initial_feedback(state_));
    done_ = goal_satisfied(state_, task_);
    advance_plan();
  }

  Demonstration run() {
    try {
      for (std::size_t i = 0; i < structured_.size() && !done_; ++i) {
        const auto& st = structured_[i];
        if (subtask_satisfied(state_, st, ordinals_[i])) continue;
        switch (st.kind) {
          case SubTaskKind::take: take(st.object_class); break;
          case SubTaskKind::heat: condition(Affordance::heat_source, Verb::heat); break;
          case SubTaskKind::cool: condition(Affordance::cool_source, Verb::cool); break;
          case SubTaskKind::clean: condition(Affordance::clean_source, Verb::clean); break;
          case SubTaskKind::place: place(st.receptacle_class); break;
          case SubTaskKind::examine: examine(st.receptacle_class); break;
        }
      }
    } catch (const BudgetExhausted&) {
    }
    demo_.solved = done_;
    demo_.final_state = state_;
    demo_.touched = touched_entities(demo_);
    return std::move(demo_);
  }

 private:
  void advance_plan() {
    while (p_ <= static_cast<int>(structured_.size()) &&
           subtask_satisfied(state_, structured_[p_ - 1], ordinals_[p_ - 1]))
      ++p_;
  }

  void act(const Action& a) {
    if (done_) return;
    if (static_cast<int>(demo_.steps.size()) >= opt_.step_budget) throw BudgetExhausted{};
    DemoStep ds;
    ds.observation = obs_;
    for (const auto& pa : permissible_actions(state_)) ds.permissible.push_back(pa.text());
    if (std::find(ds.permissible.begin(), ds.permissible.end(), a.text()) == ds.permissible.end())
      throw std::logic_error("expert chose a non-permissible action: " + a.text());
    ds.action = a;
    ds.subtask_index = std::min(p_, static_cast<int>(structured_.size()));
    demo_.steps.push_back(std::move(ds));

    auto res = step(state_, task_, a);
    state_ = std::move(res.state);
    done_ = res.done;
    obs_ = render_observation(state_, res.feedback);
    if (p_ <= static_cast<int>(structured_.size()) &&
        subtask_satisfied(state_, structured_[p_ - 1], ordinals_[p_ - 1]))
      ++p_;
    see();
  }

  void see() {
    if (state_.agent_at == kStart) return;
    if (!state_.receptacles[state_.agent_at].accessible()) return;
    for (int id : state_.contents(state_.agent_at)) seen_[id] = state_.agent_at;
  }

  std::string rname(int r) const { return state_.receptacles[r].name(); }

  void go(int r) {
    if (state_.agent_at != r) act({Verb::go_to, "", rname(r)});
  }

  // Returns true when this call opened the receptacle.
  bool open_here() {
    const auto& rec = state_.receptacles[state_.agent_at];
    if (rec.openable() && !rec.open) {
      act({Verb::open, "", rec.name()});
      return true;
    }
    return false;
  }

  int place_target(std::string_view cls) const {
    auto ids = state_.receptacles_of(cls);
    if (ids.empty()) throw std::logic_error("no receptacle of class " + std::string(cls));
    return *std::min_element(ids.begin(), ids.end(), [&](int a, int b) {
      return state_.receptacles[a].index < state_.receptacles[b].index;
    });
  }

  // Object of class `cls` available at r (not already placed at the target of
  // a pick_two task), lowest index first.
  int available_at(int r, std::string_view cls) const {
    int best = -1;
    for (int id : state_.contents(r)) {
      const auto& o = state_.objects[id];
      if (o.cls != cls) continue;
      if (task_.type == TaskType::pick_two_and_place && r == place_target(task_.receptacle_class)) continue;
      if (best < 0 || o.index < state_.objects[best].index) best = id;
    }
    return best;
  }

  bool try_take_at(int r, std::string_view cls) {
    go(r);
    const bool opened = open_here();
    const int id = available_at(r, cls);
    if (id >= 0) act({Verb::take, state_.objects[id].name(), rname(r)});
    if (opened && !done_) act({Verb::close, "", rname(r)});
    return id >= 0;
  }

  void take(const std::string& cls) {
    for (const auto& [id, r] : seen_) {
      if (state_.objects[id].cls == cls && state_.objects[id].location == r && available_at(r, cls) >= 0) {
        if (try_take_at(r, cls)) return;
      }
    }
    for (int r : search_order(state_, catalog_, cls)) {
      if (visited_.count(r)) continue;
      visited_.insert(r);
      if (try_take_at(r, cls)) return;
    }
    throw BudgetExhausted{};
  }

  void condition(Affordance source, Verb verb) {
    int target = -1;
    for (int r = 0; r < static_cast<int>(state_.receptacles.size()); ++r) {
      const auto& rec = state_.receptacles[r];
      if (!rec.flags.has(source)) continue;
      if (target < 0 || rec.cls < state_.receptacles[target].cls ||
          (rec.cls == state_.receptacles[target].cls && rec.index < state_.receptacles[target].index))
        target = r;
    }
    if (target < 0) throw BudgetExhausted{};
    const auto held = state_.held();
    if (!held) throw BudgetExhausted{};
    go(target);
    act({verb, state_.objects[*held].name(), rname(target)});
  }

  void place(const std::string& cls) {
    const int target = place_target(cls);
    const auto held = state_.held();
    if (!held) throw BudgetExhausted{};
    go(target);
    open_here();
    act({Verb::put, state_.objects[*held].name(), rname(target)});
    if (state_.receptacles[target].openable() && state_.receptacles[target].open && !done_)
      act({Verb::close, "", rname(target)});
  }

  void examine(const std::string& cls) {
    const int lamp = place_target(cls);
    go(lamp);
    act({Verb::use, "", rname(lamp)});
  }

  WorldState state_;
  const TaskSpec& task_;
  const Catalog& catalog_;
  const ExpertOptions& opt_;
  Demonstration demo_;
  std::vector<SubTask> structured_;
  std::vector<int> ordinals_;
  Observation obs_;
  bool done_ = false;
  int p_ = 1;
  std::map<int, int> seen_;  // object id -> receptacle where last seen
  std::set<int> visited_;
};

}  // namespace

Demonstration solve(const WorldState& state, const TaskSpec& task, const Catalog& catalog,
                    const ExpertOptions& options, const Phrasebook& pb) {
  return Runner(state, task, catalog, options, pb).run();
}

std::set<std::string> touched_entities(const Demonstration& demo) {
  std::set<std::string> out;
  for (const auto& s : demo.steps) {
    if (!s.action.object.empty()) out.insert(s.action.object);
    if (!s.action.receptacle.empty()) out.insert(s.action.receptacle);
  }
  return out;
}

}  // namespace pet

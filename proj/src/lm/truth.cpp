#include "pet/lm/truth.hpp"

#include <algorithm>

namespace pet::lm {

EpisodeTruth EpisodeTruth::from_scene(const WorldState& initial, const TaskSpec& task, const Catalog& catalog,
                                      const Phrasebook& pb) {
  EpisodeTruth t;
  t.catalog = &catalog;
  t.phrasebook = &pb;
  t.task = task;
  t.demo = solve(initial, task, catalog, {}, pb);
  t.state = initial;
  return t;
}

std::vector<std::string> EpisodeTruth::scene_classes() const {
  std::vector<std::string> out;
  auto add = [&](const std::string& c) {
    if (std::find(out.begin(), out.end(), c) == out.end()) out.push_back(c);
  };
  for (const auto& r : state.receptacles) add(r.cls);
  for (const auto& o : state.objects) add(o.cls);
  return out;
}

namespace {

void add_class_instances(const WorldState& s, const std::string& cls, std::set<std::string>& out) {
  if (cls.empty()) return;
  for (const auto& r : s.receptacles)
    if (r.cls == cls) out.insert(r.name());
  for (const auto& o : s.objects)
    if (o.cls == cls) out.insert(o.name());
}

}  // namespace

std::set<std::string> EpisodeTruth::relevant_for_task() const {
  std::set<std::string> out = demo.touched;
  add_class_instances(state, task.object_class, out);
  add_class_instances(state, task.receptacle_class, out);
  return out;
}

std::set<std::string> EpisodeTruth::relevant_for_subtask(const SubTask& s) const {
  std::set<std::string> out;
  const auto plan = decompose(task);
  for (const auto& st : demo.steps) {
    const int idx = st.subtask_index - 1;
    if (idx < 0 || idx >= static_cast<int>(plan.size()) || !(plan[idx] == s)) continue;
    if (!st.action.object.empty()) out.insert(st.action.object);
    if (!st.action.receptacle.empty()) out.insert(st.action.receptacle);
  }
  add_class_instances(state, s.object_class, out);
  add_class_instances(state, s.receptacle_class, out);
  return out;
}

}  // namespace pet::lm

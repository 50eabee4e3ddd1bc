#include "pet/scene.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

#include "pet/engine.hpp"
#include "pet/expert.hpp"
#include "pet/json_io.hpp"
#include "pet/rng.hpp"

namespace pet {

void SceneConfig::validate() const {
  if (min_receptacles < 5 || max_receptacles > 30 || min_receptacles > max_receptacles)
    throw std::invalid_argument("receptacle count bounds must lie within 5..30");
  if (max_objects_per_receptacle < 0 || max_objects_per_receptacle > 15)
    throw std::invalid_argument("objects per receptacle must lie within 0..15");
  if (anomaly_rate < 0.0 || anomaly_rate > 1.0) throw std::invalid_argument("anomaly_rate must lie within [0,1]");
  if (max_attempts < 1) throw std::invalid_argument("max_attempts must be positive");
}

WorldState generate_room(std::uint64_t seed, const SceneConfig& config, const Catalog& catalog) {
  config.validate();
  Rng rng(seed);
  const auto& rooms = catalog.rooms();
  if (rooms.empty()) throw SceneError("catalog has no room templates");
  const RoomTemplate& tpl = rooms[rng.below(rooms.size())];

  WorldState s;
  s.room = tpl.name;
  std::map<std::string, int> counter;
  auto add_receptacle = [&](const std::string& cls) {
    ReceptacleInstance r;
    r.cls = cls;
    r.index = ++counter[cls];
    r.flags = catalog.receptacle(cls)->flags;
    s.receptacles.push_back(std::move(r));
  };
  for (const auto& cls : tpl.required) add_receptacle(cls);

  const int target = rng.between(config.min_receptacles, config.max_receptacles);
  auto pool = tpl.optional;
  while (static_cast<int>(s.receptacles.size()) < target) {
    std::vector<std::size_t> open;
    for (std::size_t i = 0; i < pool.size(); ++i)
      if (pool[i].second > 0) open.push_back(i);
    if (open.empty()) break;
    auto& entry = pool[open[rng.below(open.size())]];
    add_receptacle(entry.first);
    --entry.second;
  }

  const auto classes = catalog.objects_in_room(tpl.name);
  if (classes.empty()) return s;
  const int nrec = static_cast<int>(s.receptacles.size());
  const int nobj = rng.between(nrec, 2 * nrec);
  std::vector<int> load(nrec, 0);
  counter.clear();

  for (int k = 0; k < nobj; ++k) {
    const ObjectClass& oc = *classes[rng.below(classes.size())];
    const bool anomaly = rng.chance(config.anomaly_rate);
    std::vector<int> candidates;
    if (anomaly) {
      for (int r = 0; r < nrec; ++r) {
        const auto& rec = s.receptacles[r];
        if (!rec.flags.has(Affordance::light_source) && load[r] < config.max_objects_per_receptacle &&
            oc.likelihood_rank(rec.cls) >= oc.likely.size())
          candidates.push_back(r);
      }
    } else {
      std::vector<std::string> present;
      for (const auto& cls : oc.likely) {
        for (int r = 0; r < nrec; ++r)
          if (s.receptacles[r].cls == cls && load[r] < config.max_objects_per_receptacle) {
            present.push_back(cls);
            break;
          }
      }
      if (!present.empty()) {
        const std::string& cls = present[rng.below(present.size())];
        for (int r = 0; r < nrec; ++r)
          if (s.receptacles[r].cls == cls && load[r] < config.max_objects_per_receptacle) candidates.push_back(r);
      }
    }
    if (candidates.empty()) continue;
    const int r = candidates[rng.below(candidates.size())];
    ObjectInstance o;
    o.cls = oc.name;
    o.index = ++counter[oc.name];
    o.flags = oc.flags;
    o.location = r;
    s.objects.push_back(std::move(o));
    ++load[r];
  }
  check_invariants(s);
  return s;
}

std::vector<TaskSpec> feasible_tasks(const WorldState& room, const Catalog& catalog) {
  std::map<std::string, int> object_count;
  for (const auto& o : room.objects) ++object_count[o.cls];
  std::set<std::string> recep_classes;
  bool has_source[3] = {false, false, false};
  std::vector<std::string> lamps;
  for (const auto& r : room.receptacles) {
    recep_classes.insert(r.cls);
    if (r.flags.has(Affordance::heat_source)) has_source[0] = true;
    if (r.flags.has(Affordance::cool_source)) has_source[1] = true;
    if (r.flags.has(Affordance::clean_source)) has_source[2] = true;
    if (r.flags.has(Affordance::light_source) && std::find(lamps.begin(), lamps.end(), r.cls) == lamps.end())
      lamps.push_back(r.cls);
  }

  std::vector<TaskSpec> out;
  for (auto type : kAllTaskTypes) {
    for (const auto& [cls, count] : object_count) {
      const ObjectClass* oc = catalog.object(cls);
      if (!oc || !oc->flags.has(Affordance::pickupable)) continue;
      bool ok = true;
      switch (type) {
        case TaskType::pick_and_place: break;
        case TaskType::pick_two_and_place: ok = count >= 2; break;
        case TaskType::heat_and_place: ok = has_source[0] && oc->flags.has(Affordance::heatable); break;
        case TaskType::cool_and_place: ok = has_source[1] && oc->flags.has(Affordance::coolable); break;
        case TaskType::clean_and_place: ok = has_source[2] && oc->flags.has(Affordance::cleanable); break;
        case TaskType::examine_in_light: ok = !lamps.empty() && oc->flags.has(Affordance::examinable); break;
      }
      if (!ok) continue;
      if (type == TaskType::examine_in_light) {
        for (const auto& lamp : lamps) out.push_back({type, cls, lamp, "", 0});
      } else {
        for (const auto& t : oc->targets)
          if (recep_classes.count(t)) out.push_back({type, cls, t, "", 0});
      }
    }
  }
  return out;
}

namespace {

bool object_in_class(const WorldState& s, const std::string& x, const std::string& r) {
  for (const auto& o : s.objects)
    if (o.cls == x && o.location >= 0 && s.receptacles[o.location].cls == r) return true;
  return false;
}

}  // namespace

Scene generate_scene(std::uint64_t seed, const SceneConfig& config, int variant, const TaskFilter& accept,
                     const Catalog& catalog, const Phrasebook& pb) {
  Scene scene;
  scene.seed = seed;
  scene.variant = variant;
  scene.state = generate_room(seed, config, catalog);
  const auto options = feasible_tasks(scene.state, catalog);
  if (options.empty()) throw SceneError("no feasible task in room for seed " + std::to_string(seed));

  std::map<TaskType, std::vector<const TaskSpec*>> by_type;
  for (const auto& t : options) by_type[t.type].push_back(&t);
  std::vector<TaskType> types;
  for (const auto& [type, list] : by_type) types.push_back(type);

  Rng rng(mix_seed(seed, static_cast<std::uint64_t>(variant) + 1));
  for (int attempt = 0; attempt < config.max_attempts; ++attempt) {
    const TaskType type = types[rng.below(types.size())];
    const auto& list = by_type[type];
    // Object class first, then receptacle, so classes with many targets are
    // not over-represented.
    std::vector<std::string> objs;
    for (const auto* t : list)
      if (std::find(objs.begin(), objs.end(), t->object_class) == objs.end()) objs.push_back(t->object_class);
    const std::string& x = objs[rng.below(objs.size())];
    std::vector<const TaskSpec*> recs;
    for (const auto* t : list)
      if (t->object_class == x) recs.push_back(t);
    TaskSpec task = *recs[rng.below(recs.size())];
    task.scene_seed = seed;
    task.goal_text = pb.goal_text(task.type, task.object_class, task.receptacle_class);

    if (accept && !accept(task)) continue;
    if (goal_satisfied(scene.state, task)) continue;
    if ((task.type == TaskType::pick_and_place || task.type == TaskType::pick_two_and_place) &&
        object_in_class(scene.state, task.object_class, task.receptacle_class))
      continue;
    const auto demo = solve(scene.state, task, catalog, ExpertOptions{config.expert_budget}, pb);
    if (!demo.solved) continue;
    scene.task = std::move(task);
    return scene;
  }
  throw SceneError("no solvable task found for seed " + std::to_string(seed) + " (variant " +
                   std::to_string(variant) + ") after " + std::to_string(config.max_attempts) + " attempts");
}

std::string scene_to_line(const Scene& scene) {
  json j{{"seed", scene.seed}, {"variant", scene.variant}, {"state", scene.state}, {"task", scene.task}};
  return j.dump();
}

Scene scene_from_line(std::string_view line) {
  const auto j = json::parse(line);
  Scene s;
  s.seed = j.at("seed").get<std::uint64_t>();
  s.variant = j.at("variant").get<int>();
  s.state = j.at("state").get<WorldState>();
  s.task = j.at("task").get<TaskSpec>();
  return s;
}

void write_scenes(const std::filesystem::path& path, const std::vector<Scene>& scenes) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (const auto& s : scenes) out << scene_to_line(s) << '\n';
}

std::vector<Scene> read_scenes(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::vector<Scene> out;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) out.push_back(scene_from_line(line));
  return out;
}

}  // namespace pet

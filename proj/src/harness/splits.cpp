#include "pet/harness/splits.hpp"

#include <stdexcept>

namespace pet::harness {

Combo combo_of(const TaskSpec& task) { return {task.type, task.object_class, task.receptacle_class}; }

std::set<Combo> combos(const std::vector<Scene>& scenes) {
  std::set<Combo> out;
  for (const auto& s : scenes) out.insert(combo_of(s.task));
  return out;
}

Splits build_splits(const SceneConfig& scene, const SplitConfig& config) {
  if (config.train < 0 || config.seen < 0 || config.unseen < 0) throw std::invalid_argument("split sizes must be >= 0");
  Splits out;
  const int tries = 20;  // seeds probed per wanted scene before giving up

  for (std::uint64_t s = config.seed_base; static_cast<int>(out.train.size()) < config.train; ++s) {
    if (s - config.seed_base > static_cast<std::uint64_t>(tries * (config.train + 1)))
      throw std::runtime_error("could not generate the training split");
    try {
      out.train.push_back(generate_scene(s, scene, 0));
    } catch (const SceneError&) {
    }
  }

  const auto trained = combos(out.train);
  const TaskFilter novel = [&](const TaskSpec& t) { return !trained.count(combo_of(t)); };

  for (const auto& base : out.train) {
    if (static_cast<int>(out.seen.size()) >= config.seen) break;
    for (int v = 1; v <= config.max_variants; ++v) {
      try {
        out.seen.push_back(generate_scene(base.seed, scene, v, novel));
        break;
      } catch (const SceneError&) {
      }
    }
  }
  if (static_cast<int>(out.seen.size()) < config.seen) throw std::runtime_error("could not generate the seen split");

  const std::uint64_t start = config.seed_base + config.unseen_offset;
  for (std::uint64_t s = start; static_cast<int>(out.unseen.size()) < config.unseen; ++s) {
    if (s - start > static_cast<std::uint64_t>(tries * (config.unseen + 1)))
      throw std::runtime_error("could not generate the unseen split");
    try {
      out.unseen.push_back(generate_scene(s, scene, 0, novel));
    } catch (const SceneError&) {
    }
  }
  return out;
}

}  // namespace pet::harness

#pragma once

#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "pet/harness/config.hpp"
#include "pet/scene.hpp"

namespace pet::harness {

using Combo = std::tuple<TaskType, std::string, std::string>;

Combo combo_of(const TaskSpec& task);

struct Splits {
  std::vector<Scene> train;
  std::vector<Scene> seen;    // training rooms, task combinations never trained on
  std::vector<Scene> unseen;  // new rooms
};

// Train rooms take variant 0 of consecutive seeds. Seen scenes redraw the
// task in a train room until the combination is new; unseen scenes come
// from a disjoint seed range and also avoid trained combinations.
Splits build_splits(const SceneConfig& scene, const SplitConfig& config);

std::set<Combo> combos(const std::vector<Scene>& scenes);

}  // namespace pet::harness

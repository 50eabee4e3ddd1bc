#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pet/catalog.hpp"
#include "pet/phrasebook.hpp"
#include "pet/task.hpp"
#include "pet/world.hpp"

namespace pet {

struct SceneConfig {
  int min_receptacles = 12;
  int max_receptacles = 18;
  int max_objects_per_receptacle = 15;
  double anomaly_rate = 0.05;
  int max_attempts = 100;
  int expert_budget = 100;

  // Throws std::invalid_argument outside 5..30 receptacles / 0..15 objects.
  void validate() const;
};

struct Scene {
  std::uint64_t seed = 0;
  int variant = 0;
  WorldState state;
  TaskSpec task;
};

class SceneError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The room depends on the seed only; different variants draw different
// tasks in the same room.
WorldState generate_room(std::uint64_t seed, const SceneConfig& config, const Catalog& catalog = Catalog::builtin());

using TaskFilter = std::function<bool(const TaskSpec&)>;

// Room plus a task the expert can solve. `accept` can further restrict the
// task draw; it counts against the attempt limit like any other rejection.
Scene generate_scene(std::uint64_t seed, const SceneConfig& config = {}, int variant = 0,
                     const TaskFilter& accept = {}, const Catalog& catalog = Catalog::builtin(),
                     const Phrasebook& pb = Phrasebook::builtin());

// Every (type, object, receptacle) combination available in a room.
std::vector<TaskSpec> feasible_tasks(const WorldState& room, const Catalog& catalog = Catalog::builtin());

std::string scene_to_line(const Scene& scene);
Scene scene_from_line(std::string_view line);
void write_scenes(const std::filesystem::path& path, const std::vector<Scene>& scenes);
std::vector<Scene> read_scenes(const std::filesystem::path& path);

}  // namespace pet

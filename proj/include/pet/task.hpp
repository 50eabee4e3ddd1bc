#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pet {

enum class TaskType {
  pick_and_place,
  pick_two_and_place,
  heat_and_place,
  cool_and_place,
  clean_and_place,
  examine_in_light,
};

inline constexpr std::array<TaskType, 6> kAllTaskTypes{
    TaskType::pick_and_place, TaskType::pick_two_and_place, TaskType::heat_and_place,
    TaskType::cool_and_place, TaskType::clean_and_place,    TaskType::examine_in_light,
};

std::string_view to_string(TaskType t);
std::optional<TaskType> task_type_from_string(std::string_view s);

// Goal definition. For examine_in_light the receptacle class is the light
// source to use.
struct TaskSpec {
  TaskType type = TaskType::pick_and_place;
  std::string object_class;
  std::string receptacle_class;
  std::string goal_text;
  std::uint64_t scene_seed = 0;

  bool operator==(const TaskSpec&) const = default;
};

enum class SubTaskKind { take, heat, cool, clean, place, examine };

std::string_view to_string(SubTaskKind k);

// One structured step of a task decomposition.
struct SubTask {
  SubTaskKind kind = SubTaskKind::take;
  std::string object_class;
  std::string receptacle_class;  // place target or lamp; empty otherwise

  bool operator==(const SubTask&) const = default;
};

// Structured ground-truth decomposition of a task.
std::vector<SubTask> decompose(const TaskSpec& task);

}  // namespace pet

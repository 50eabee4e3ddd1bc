#include "pet/task.hpp"

namespace pet {

std::string_view to_string(TaskType t) {
  switch (t) {
    case TaskType::pick_and_place: return "pick_and_place";
    case TaskType::pick_two_and_place: return "pick_two_and_place";
    case TaskType::heat_and_place: return "heat_and_place";
    case TaskType::cool_and_place: return "cool_and_place";
    case TaskType::clean_and_place: return "clean_and_place";
    case TaskType::examine_in_light: return "examine_in_light";
  }
  return "?";
}

std::optional<TaskType> task_type_from_string(std::string_view s) {
  for (auto t : kAllTaskTypes)
    if (to_string(t) == s) return t;
  return std::nullopt;
}

std::string_view to_string(SubTaskKind k) {
  switch (k) {
    case SubTaskKind::take: return "take";
    case SubTaskKind::heat: return "heat";
    case SubTaskKind::cool: return "cool";
    case SubTaskKind::clean: return "clean";
    case SubTaskKind::place: return "place";
    case SubTaskKind::examine: return "examine";
  }
  return "?";
}

std::vector<SubTask> decompose(const TaskSpec& task) {
  const auto& o = task.object_class;
  const auto& r = task.receptacle_class;
  const SubTask take{SubTaskKind::take, o, ""};
  const SubTask place{SubTaskKind::place, o, r};
  switch (task.type) {
    case TaskType::pick_and_place: return {take, place};
    case TaskType::pick_two_and_place: return {take, place, take, place};
    case TaskType::heat_and_place: return {take, {SubTaskKind::heat, o, ""}, place};
    case TaskType::cool_and_place: return {take, {SubTaskKind::cool, o, ""}, place};
    case TaskType::clean_and_place: return {take, {SubTaskKind::clean, o, ""}, place};
    case TaskType::examine_in_light: return {take, {SubTaskKind::examine, o, r}};
  }
  return {};
}

}  // namespace pet

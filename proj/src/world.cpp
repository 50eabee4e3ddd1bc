#include "pet/world.hpp"

#include <algorithm>
#include <set>

namespace pet {

std::vector<int> WorldState::contents(int r) const {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(objects.size()); ++i)
    if (objects[i].location == r) out.push_back(i);
  return out;
}

std::optional<int> WorldState::held() const {
  for (int i = 0; i < static_cast<int>(objects.size()); ++i)
    if (objects[i].location == kInventory) return i;
  return std::nullopt;
}

int WorldState::find_receptacle(std::string_view name) const {
  for (int i = 0; i < static_cast<int>(receptacles.size()); ++i)
    if (receptacles[i].name() == name) return i;
  return -1;
}

int WorldState::find_object(std::string_view name) const {
  for (int i = 0; i < static_cast<int>(objects.size()); ++i)
    if (objects[i].name() == name) return i;
  return -1;
}

std::vector<int> WorldState::receptacles_of(std::string_view cls) const {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(receptacles.size()); ++i)
    if (receptacles[i].cls == cls) out.push_back(i);
  return out;
}

void check_invariants(const WorldState& s) {
  std::set<std::string> names;
  for (const auto& r : s.receptacles) {
    if (r.index < 1) throw StateError("receptacle index below 1: " + r.name());
    if (!names.insert(r.name()).second) throw StateError("duplicate instance name " + r.name());
  }
  int carried = 0;
  const int nr = static_cast<int>(s.receptacles.size());
  for (const auto& o : s.objects) {
    if (o.index < 1) throw StateError("object index below 1: " + o.name());
    if (!names.insert(o.name()).second) throw StateError("duplicate instance name " + o.name());
    if (o.location == kInventory)
      ++carried;
    else if (o.location < 0 || o.location >= nr)
      throw StateError("object " + o.name() + " has no valid location");
    if (o.heated && o.cooled) throw StateError("object " + o.name() + " is both heated and cooled");
  }
  if (carried > 1) throw StateError("inventory holds more than one object");
  if (s.agent_at != kStart && (s.agent_at < 0 || s.agent_at >= nr)) throw StateError("agent location out of range");
  if (s.step_count < 0) throw StateError("negative step count");
}

std::vector<std::string> listing_order(std::vector<std::pair<std::string, int>> entities) {
  std::sort(entities.begin(), entities.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return a.second > b.second;
  });
  std::vector<std::string> out;
  out.reserve(entities.size());
  for (const auto& [cls, idx] : entities) out.push_back(cls + " " + std::to_string(idx));
  return out;
}

}  // namespace pet

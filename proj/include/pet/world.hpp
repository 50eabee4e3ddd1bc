#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pet/catalog.hpp"

namespace pet {

inline constexpr int kInventory = -1;  // object location: carried by the agent
inline constexpr int kStart = -1;      // agent_at: not at any receptacle yet

struct ReceptacleInstance {
  std::string cls;
  int index = 1;
  Affordances flags;
  bool open = false;  // meaningful only for openable receptacles
  bool lit = false;   // meaningful only for light sources

  std::string name() const { return cls + " " + std::to_string(index); }
  bool openable() const { return flags.has(Affordance::openable); }
  // Contents can be seen and reached.
  bool accessible() const { return !openable() || open; }
  bool operator==(const ReceptacleInstance&) const = default;
};

struct ObjectInstance {
  std::string cls;
  int index = 1;
  Affordances flags;
  int location = kInventory;  // receptacle id or kInventory
  bool heated = false;
  bool cooled = false;
  bool cleaned = false;

  std::string name() const { return cls + " " + std::to_string(index); }
  bool operator==(const ObjectInstance&) const = default;
};

// What the latest feedback lists: the whole room, the contents of the
// receptacle the agent stands at, or nothing.
enum class View { none, room, location };

struct WorldState {
  std::string room;
  std::vector<ReceptacleInstance> receptacles;
  std::vector<ObjectInstance> objects;
  int agent_at = kStart;
  int step_count = 0;
  View view = View::room;

  // Object ids inside receptacle `r`, in id order.
  std::vector<int> contents(int r) const;
  std::optional<int> held() const;

  int find_receptacle(std::string_view name) const;  // -1 when absent
  int find_object(std::string_view name) const;      // -1 when absent
  // Ids of every instance of a class.
  std::vector<int> receptacles_of(std::string_view cls) const;

  bool operator==(const WorldState&) const = default;
};

class StateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Throws StateError when a structural invariant is broken (duplicate names,
// dangling locations, more than one carried object, ...).
void check_invariants(const WorldState& s);

// Names sorted for listing: class ascending, then index descending.
std::vector<std::string> listing_order(std::vector<std::pair<std::string, int>> entities);

}  // namespace pet

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pet {

enum class Affordance : std::uint16_t {
  openable = 1 << 0,
  heat_source = 1 << 1,
  cool_source = 1 << 2,
  clean_source = 1 << 3,
  light_source = 1 << 4,
  pickupable = 1 << 5,
  heatable = 1 << 6,
  coolable = 1 << 7,
  cleanable = 1 << 8,
  examinable = 1 << 9,
};

// Bit set over Affordance.
class Affordances {
 public:
  constexpr Affordances() = default;
  constexpr Affordances(std::initializer_list<Affordance> list) {
    for (auto a : list) bits_ |= static_cast<std::uint16_t>(a);
  }
  constexpr bool has(Affordance a) const { return (bits_ & static_cast<std::uint16_t>(a)) != 0; }
  constexpr void set(Affordance a) { bits_ |= static_cast<std::uint16_t>(a); }
  constexpr std::uint16_t bits() const { return bits_; }
  static constexpr Affordances from_bits(std::uint16_t b) {
    Affordances a;
    a.bits_ = b;
    return a;
  }
  constexpr bool operator==(const Affordances&) const = default;

 private:
  std::uint16_t bits_ = 0;
};

std::string_view to_string(Affordance a);
Affordance affordance_from_string(std::string_view name);

struct ReceptacleClass {
  std::string name;
  Affordances flags;
};

struct ObjectClass {
  std::string name;
  Affordances flags;
  std::vector<std::string> tags;
  std::vector<std::string> rooms;
  std::vector<std::string> likely;   // spawn prior, most likely first
  std::vector<std::string> targets;  // sensible placement receptacles

  bool has_tag(std::string_view tag) const;
  // Position in `likely`, or likely.size() when absent.
  std::size_t likelihood_rank(std::string_view receptacle_class) const;
};

struct RoomTemplate {
  std::string name;
  std::vector<std::string> required;
  std::vector<std::pair<std::string, int>> optional;  // class, max extra instances
};

class CatalogError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Receptacle/object class registry plus room templates.
class Catalog {
 public:
  static const Catalog& builtin();
  static Catalog load(const std::filesystem::path& path);
  static Catalog parse(std::istream& in, std::string_view source_name);

  // Adds the records of another catalog file; later records replace earlier
  // ones of the same kind and name.
  void extend(std::istream& in, std::string_view source_name);

  const ReceptacleClass* receptacle(std::string_view name) const;
  const ObjectClass* object(std::string_view name) const;
  const RoomTemplate* room(std::string_view name) const;

  const std::vector<ReceptacleClass>& receptacles() const { return receptacles_; }
  const std::vector<ObjectClass>& objects() const { return objects_; }
  const std::vector<RoomTemplate>& rooms() const { return rooms_; }

  std::vector<const ObjectClass*> objects_in_room(std::string_view room) const;

 private:
  void validate(std::string_view source_name) const;

  std::vector<ReceptacleClass> receptacles_;
  std::vector<ObjectClass> objects_;
  std::vector<RoomTemplate> rooms_;
};

}  // namespace pet

#include "pet/catalog.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "pet/text.hpp"

namespace pet {
namespace data {
extern const std::string_view catalog_ini;
}

namespace {

constexpr std::array<std::pair<Affordance, std::string_view>, 10> kAffordanceNames{{
    {Affordance::openable, "openable"},
    {Affordance::heat_source, "heat_source"},
    {Affordance::cool_source, "cool_source"},
    {Affordance::clean_source, "clean_source"},
    {Affordance::light_source, "light_source"},
    {Affordance::pickupable, "pickupable"},
    {Affordance::heatable, "heatable"},
    {Affordance::coolable, "coolable"},
    {Affordance::cleanable, "cleanable"},
    {Affordance::examinable, "examinable"},
}};

constexpr Affordances kReceptacleOnly{Affordance::openable, Affordance::heat_source, Affordance::cool_source,
                                      Affordance::clean_source, Affordance::light_source};

bool valid_name(std::string_view name) {
  return !name.empty() && std::all_of(name.begin(), name.end(), [](char c) { return c >= 'a' && c <= 'z'; });
}

Affordances parse_flags(const std::string& list) {
  Affordances out;
  for (const auto& word : split_words(list)) out.set(affordance_from_string(word));
  return out;
}

template <class T>
void upsert(std::vector<T>& items, T item) {
  auto it = std::find_if(items.begin(), items.end(), [&](const T& x) { return x.name == item.name; });
  if (it == items.end())
    items.push_back(std::move(item));
  else
    *it = std::move(item);
}

}  // namespace

std::string_view to_string(Affordance a) {
  for (const auto& [value, name] : kAffordanceNames)
    if (value == a) return name;
  return "?";
}

Affordance affordance_from_string(std::string_view name) {
  for (const auto& [value, n] : kAffordanceNames)
    if (n == name) return value;
  throw CatalogError("unknown affordance '" + std::string(name) + "'");
}

bool ObjectClass::has_tag(std::string_view tag) const {
  return std::find(tags.begin(), tags.end(), tag) != tags.end();
}

std::size_t ObjectClass::likelihood_rank(std::string_view receptacle_class) const {
  auto it = std::find(likely.begin(), likely.end(), receptacle_class);
  return static_cast<std::size_t>(it - likely.begin());
}

const Catalog& Catalog::builtin() {
  static const Catalog catalog = [] {
    std::istringstream in{std::string(data::catalog_ini)};
    return parse(in, "<builtin catalog>");
  }();
  return catalog;
}

Catalog Catalog::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw CatalogError("cannot open catalog " + path.string());
  return parse(in, path.string());
}

Catalog Catalog::parse(std::istream& in, std::string_view source_name) {
  Catalog c;
  c.extend(in, source_name);
  return c;
}

void Catalog::extend(std::istream& in, std::string_view source_name) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw CatalogError(std::string(source_name) + ": " + e.message() + " (line " + std::to_string(e.line()) + ")");
  }

  for (const auto& [section, body] : tree) {
    const auto colon = section.find(':');
    if (colon == std::string::npos)
      throw CatalogError(std::string(source_name) + ": section '" + section + "' lacks a kind prefix");
    const std::string kind = section.substr(0, colon);
    const std::string name = section.substr(colon + 1);
    if (!valid_name(name))
      throw CatalogError(std::string(source_name) + ": invalid class name '" + name + "'");
    const auto list = [&](const char* key) { return split_words(body.get<std::string>(key, "")); };

    if (kind == "receptacle") {
      upsert(receptacles_, ReceptacleClass{name, parse_flags(body.get<std::string>("flags", ""))});
    } else if (kind == "object") {
      ObjectClass o;
      o.name = name;
      o.flags = parse_flags(body.get<std::string>("flags", ""));
      o.tags = list("tags");
      o.rooms = list("rooms");
      o.likely = list("likely");
      o.targets = list("targets");
      upsert(objects_, std::move(o));
    } else if (kind == "room") {
      RoomTemplate r;
      r.name = name;
      r.required = list("required");
      for (const auto& entry : list("optional")) {
        const auto star = entry.find('*');
        if (star == std::string::npos) {
          r.optional.emplace_back(entry, 1);
        } else {
          r.optional.emplace_back(entry.substr(0, star), std::stoi(entry.substr(star + 1)));
        }
      }
      upsert(rooms_, std::move(r));
    } else {
      throw CatalogError(std::string(source_name) + ": unknown record kind '" + kind + "'");
    }
  }
  validate(source_name);
}

void Catalog::validate(std::string_view source_name) const {
  const std::string where(source_name);
  for (const auto& r : receptacles_) {
    if (r.flags.has(Affordance::pickupable))
      throw CatalogError(where + ": receptacle '" + r.name + "' cannot be pickupable");
  }
  for (const auto& o : objects_) {
    if (o.flags.bits() & kReceptacleOnly.bits())
      throw CatalogError(where + ": object '" + o.name + "' carries a receptacle-only affordance");
    if (receptacle(o.name))
      throw CatalogError(where + ": '" + o.name + "' is both a receptacle and an object class");
    for (const auto& list : {o.likely, o.targets})
      for (const auto& rc : list)
        if (!receptacle(rc))
          throw CatalogError(where + ": object '" + o.name + "' references unknown receptacle '" + rc + "'");
    for (const auto& room_name : o.rooms)
      if (!room(room_name))
        throw CatalogError(where + ": object '" + o.name + "' references unknown room '" + room_name + "'");
  }
  for (const auto& room_tpl : rooms_) {
    for (const auto& rc : room_tpl.required)
      if (!receptacle(rc))
        throw CatalogError(where + ": room '" + room_tpl.name + "' requires unknown receptacle '" + rc + "'");
    for (const auto& [rc, cap] : room_tpl.optional)
      if (!receptacle(rc) || cap < 0)
        throw CatalogError(where + ": room '" + room_tpl.name + "' has bad optional entry '" + rc + "'");
  }
}

const ReceptacleClass* Catalog::receptacle(std::string_view name) const {
  for (const auto& r : receptacles_)
    if (r.name == name) return &r;
  return nullptr;
}

const ObjectClass* Catalog::object(std::string_view name) const {
  for (const auto& o : objects_)
    if (o.name == name) return &o;
  return nullptr;
}

const RoomTemplate* Catalog::room(std::string_view name) const {
  for (const auto& r : rooms_)
    if (r.name == name) return &r;
  return nullptr;
}

std::vector<const ObjectClass*> Catalog::objects_in_room(std::string_view room_name) const {
  std::vector<const ObjectClass*> out;
  for (const auto& o : objects_)
    if (std::find(o.rooms.begin(), o.rooms.end(), room_name) != o.rooms.end()) out.push_back(&o);
  return out;
}

}  // namespace pet

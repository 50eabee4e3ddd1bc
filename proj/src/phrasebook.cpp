#include "pet/phrasebook.hpp"

#include <algorithm>
#include <regex>
#include <stdexcept>

#include "json.hpp"

#include "pet/catalog.hpp"
#include "pet/text.hpp"

namespace pet {
namespace data {
extern const std::string_view phrasebook_json;
}

namespace {

const std::vector<std::string> kEmpty;

std::optional<SubTaskKind> subtask_kind_from_key(std::string_view key) {
  if (key == "take" || key == "take_vowel") return SubTaskKind::take;
  if (key == "place") return SubTaskKind::place;
  if (key == "heat") return SubTaskKind::heat;
  if (key == "cool") return SubTaskKind::cool;
  if (key == "clean") return SubTaskKind::clean;
  if (key == "examine") return SubTaskKind::examine;
  return std::nullopt;
}

bool starts_with_vowel(std::string_view s) {
  return !s.empty() && std::string_view("aeiou").find(s.front()) != std::string_view::npos;
}

// Compiled form of a pattern. Slot order records which capture is which.
struct CompiledPattern {
  std::regex re;
  std::vector<char> slots;  // 'o' or 'r'
};

CompiledPattern compile(std::string_view pattern) {
  static const std::string special = R"(\^$.|?*+()[]{})";
  CompiledPattern out;
  std::string re = "^";
  const std::string p = normalize_phrase(pattern);
  for (std::size_t i = 0; i < p.size();) {
    if (p.compare(i, 3, "{o}") == 0 || p.compare(i, 3, "{r}") == 0) {
      out.slots.push_back(p[i + 1]);
      re += "(.+?)";
      i += 3;
    } else if (p.compare(i, 7, " in/on ") == 0) {
      re += " (?:in/on|in|on|into|onto) ";
      i += 7;
    } else {
      if (special.find(p[i]) != std::string::npos) re += '\\';
      re += p[i];
      ++i;
    }
  }
  re += "$";
  out.re = std::regex(re);
  return out;
}

const CompiledPattern& compiled(const std::string& pattern) {
  thread_local std::map<std::string, CompiledPattern> memo;
  auto it = memo.find(pattern);
  if (it == memo.end()) it = memo.emplace(pattern, compile(pattern)).first;
  return it->second;
}

std::string strip_articles(std::string phrase) {
  static const std::vector<std::string> lead = {"the ", "a ", "an ", "some ", "two ", "pair of ", "one "};
  bool again = true;
  while (again) {
    again = false;
    for (const auto& art : lead) {
      if (phrase.rfind(art, 0) == 0) {
        phrase.erase(0, art.size());
        again = true;
      }
    }
  }
  return trim(phrase);
}

enum class Want { any, object, receptacle };

bool kind_ok(const Catalog& c, const std::string& cls, Want want) {
  switch (want) {
    case Want::object: return c.object(cls) != nullptr;
    case Want::receptacle: return c.receptacle(cls) != nullptr;
    case Want::any: return c.object(cls) || c.receptacle(cls);
  }
  return false;
}

}  // namespace

std::string normalize_phrase(std::string_view text) {
  std::string s = collapse_spaces(trim(to_lower(text)));
  while (!s.empty() && (s.back() == '.' || s.back() == '?' || s.back() == '!')) s.pop_back();
  return trim(s);
}

const Phrasebook& Phrasebook::builtin() {
  static const Phrasebook pb = parse(data::phrasebook_json);
  return pb;
}

Phrasebook Phrasebook::parse(std::string_view json_text) {
  const auto j = nlohmann::json::parse(json_text);
  if (!j.is_object()) throw std::invalid_argument("phrasebook: top level must be an object");
  Phrasebook pb;
  for (auto t : kAllTaskTypes) {
    const std::string key(to_string(t));
    if (j.contains("goal_templates") && j["goal_templates"].contains(key))
      pb.goal_templates_[t] = j["goal_templates"][key].get<std::string>();
    if (j.contains("goal_paraphrases") && j["goal_paraphrases"].contains(key))
      pb.goal_paraphrases_[t] = j["goal_paraphrases"][key].get<std::vector<std::string>>();
  }
  if (j.contains("noun_synonyms"))
    for (const auto& [cls, list] : j["noun_synonyms"].items())
      pb.noun_synonyms_[cls] = list.get<std::vector<std::string>>();
  for (const auto& [cls, list] : pb.noun_synonyms_)
    for (const auto& phrase : list) {
      const auto words = tokenize(phrase);
      pb.synonym_classes_[join(words, " ")].push_back(cls);
      pb.longest_synonym_ = std::max(pb.longest_synonym_, words.size());
    }
  if (j.contains("subtask_templates"))
    for (const auto& [key, pattern] : j["subtask_templates"].items()) {
      if (!subtask_kind_from_key(key)) throw std::runtime_error("phrasebook: unknown sub-task key '" + key + "'");
      pb.subtask_templates_[key] = pattern.get<std::string>();
    }
  if (j.contains("subtask_paraphrases"))
    for (const auto& [key, list] : j["subtask_paraphrases"].items()) {
      auto kind = subtask_kind_from_key(key);
      if (!kind) throw std::runtime_error("phrasebook: unknown sub-task key '" + key + "'");
      pb.subtask_paraphrases_[*kind] = list.get<std::vector<std::string>>();
    }
  return pb;
}

std::string Phrasebook::goal_text(TaskType type, std::string_view object, std::string_view receptacle) const {
  auto it = goal_templates_.find(type);
  if (it == goal_templates_.end()) throw std::runtime_error("phrasebook: no goal template for " + std::string(to_string(type)));
  return fill(fill(it->second, "o", object), "r", receptacle);
}

std::string Phrasebook::subtask_text(const SubTask& s) const {
  std::string key(to_string(s.kind));
  if (s.kind == SubTaskKind::take && starts_with_vowel(s.object_class) && subtask_templates_.count("take_vowel"))
    key = "take_vowel";
  auto it = subtask_templates_.find(key);
  if (it == subtask_templates_.end()) throw std::runtime_error("phrasebook: no sub-task template '" + key + "'");
  return fill(fill(it->second, "o", s.object_class), "r", s.receptacle_class);
}

const std::vector<std::string>& Phrasebook::goal_paraphrases(TaskType type) const {
  auto it = goal_paraphrases_.find(type);
  return it == goal_paraphrases_.end() ? kEmpty : it->second;
}

const std::vector<std::string>& Phrasebook::subtask_paraphrases(SubTaskKind kind) const {
  auto it = subtask_paraphrases_.find(kind);
  return it == subtask_paraphrases_.end() ? kEmpty : it->second;
}

const std::vector<std::string>& Phrasebook::noun_synonyms(std::string_view cls) const {
  auto it = noun_synonyms_.find(cls);
  return it == noun_synonyms_.end() ? kEmpty : it->second;
}

namespace {

// (class, the singular surface phrase that matched it)
using Resolved = std::pair<std::string, std::string>;

std::optional<Resolved> resolve_full(const std::map<std::string, std::vector<std::string>, std::less<>>& syn,
                                     std::string_view phrase, const Catalog& catalog,
                                     const std::vector<std::string>& prefer, Want want) {
  const std::string base = strip_articles(normalize_phrase(phrase));
  if (base.empty()) return std::nullopt;

  auto attempt = [&](const std::string& p) -> std::optional<Resolved> {
    if (kind_ok(catalog, p, want)) return Resolved{p, p};
    std::vector<std::string> hits;
    for (const auto& [cls, list] : syn)
      if (std::find(list.begin(), list.end(), p) != list.end() && kind_ok(catalog, cls, want)) hits.push_back(cls);
    if (hits.empty()) return std::nullopt;
    for (const auto& h : hits)
      if (std::find(prefer.begin(), prefer.end(), h) != prefer.end()) return Resolved{h, p};
    return Resolved{hits.front(), p};
  };

  if (auto r = attempt(base)) return r;
  if (base.size() > 1 && base.back() == 's') {
    if (auto r = attempt(base.substr(0, base.size() - 1))) return r;
    if (base.size() > 3 && base.compare(base.size() - 3, 3, "ies") == 0)
      if (auto r = attempt(base.substr(0, base.size() - 3) + "y")) return r;
    if (base.size() > 2 && base.compare(base.size() - 2, 2, "es") == 0)
      if (auto r = attempt(base.substr(0, base.size() - 2))) return r;
  }
  return std::nullopt;
}

std::optional<std::string> resolve(const std::map<std::string, std::vector<std::string>, std::less<>>& syn,
                                   std::string_view phrase, const Catalog& catalog,
                                   const std::vector<std::string>& prefer, Want want) {
  auto r = resolve_full(syn, phrase, catalog, prefer, want);
  if (!r) return std::nullopt;
  return r->first;
}

}  // namespace

std::optional<std::string> Phrasebook::resolve_noun(std::string_view phrase, const Catalog& catalog,
                                                    const std::vector<std::string>& prefer) const {
  return resolve(noun_synonyms_, phrase, catalog, prefer, Want::any);
}

std::string Phrasebook::canonical_nouns(std::string_view text, const std::vector<std::string>& prefer) const {
  const auto words = tokenize(text);
  auto lookup = [&](const std::string& phrase) -> const std::vector<std::string>* {
    if (auto it = synonym_classes_.find(phrase); it != synonym_classes_.end()) return &it->second;
    if (phrase.size() > 1 && phrase.back() == 's')
      if (auto it = synonym_classes_.find(phrase.substr(0, phrase.size() - 1)); it != synonym_classes_.end())
        return &it->second;
    return nullptr;
  };
  std::vector<std::string> out;
  for (std::size_t i = 0; i < words.size();) {
    bool matched = false;
    for (std::size_t n = std::min(longest_synonym_, words.size() - i); n >= 1 && !matched; --n) {
      std::vector<std::string> span(words.begin() + static_cast<std::ptrdiff_t>(i),
                                    words.begin() + static_cast<std::ptrdiff_t>(i + n));
      const auto* classes = lookup(join(span, " "));
      if (!classes) continue;
      std::string cls = classes->front();
      for (const auto& c : *classes)
        if (std::find(prefer.begin(), prefer.end(), c) != prefer.end()) {
          cls = c;
          break;
        }
      out.push_back(cls);
      i += n;
      matched = true;
    }
    if (!matched) out.push_back(words[i++]);
  }
  return join(out, " ");
}

std::optional<ParsedGoal> Phrasebook::parse_goal(std::string_view text, const Catalog& catalog,
                                                 const std::vector<std::string>& prefer) const {
  const std::string norm = normalize_phrase(text);
  for (auto t : kAllTaskTypes) {
    std::vector<std::string> patterns;
    if (auto it = goal_templates_.find(t); it != goal_templates_.end()) patterns.push_back(it->second);
    for (const auto& p : goal_paraphrases(t)) patterns.push_back(p);
    for (const auto& pattern : patterns) {
      const auto& cp = compiled(pattern);
      std::smatch m;
      if (!std::regex_match(norm, m, cp.re)) continue;
      std::optional<Resolved> o, r;
      bool ok = true;
      for (std::size_t i = 0; i < cp.slots.size() && ok; ++i) {
        const std::string slot = m[i + 1].str();
        if (cp.slots[i] == 'o') {
          o = resolve_full(noun_synonyms_, slot, catalog, prefer, Want::object);
          ok = o.has_value();
        } else {
          r = resolve_full(noun_synonyms_, slot, catalog, prefer, Want::receptacle);
          ok = r.has_value();
        }
      }
      if (ok && o && r) return ParsedGoal{t, o->first, r->first, o->second, r->second};
    }
  }
  return std::nullopt;
}

std::optional<SubTask> Phrasebook::parse_subtask(std::string_view text, const Catalog& catalog,
                                                 const std::vector<std::string>& prefer) const {
  const std::string norm = normalize_phrase(text);
  std::vector<std::pair<SubTaskKind, std::string>> patterns;
  for (const auto& [key, pattern] : subtask_templates_) patterns.emplace_back(*subtask_kind_from_key(key), pattern);
  for (const auto& [kind, list] : subtask_paraphrases_)
    for (const auto& p : list) patterns.emplace_back(kind, p);

  for (const auto& [kind, pattern] : patterns) {
    const auto& cp = compiled(pattern);
    std::smatch m;
    if (!std::regex_match(norm, m, cp.re)) continue;
    SubTask s{kind, "", ""};
    bool ok = true;
    for (std::size_t i = 0; i < cp.slots.size() && ok; ++i) {
      const std::string slot = m[i + 1].str();
      auto cls = resolve(noun_synonyms_, slot, catalog, prefer,
                         cp.slots[i] == 'o' ? Want::object : Want::receptacle);
      ok = cls.has_value();
      if (ok) (cp.slots[i] == 'o' ? s.object_class : s.receptacle_class) = *cls;
    }
    if (ok && !s.object_class.empty()) return s;
  }
  return std::nullopt;
}

}  // namespace pet

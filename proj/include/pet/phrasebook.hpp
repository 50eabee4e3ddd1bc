#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pet/task.hpp"

namespace pet {

class Catalog;

struct ParsedGoal {
  TaskType type;
  std::string object_class;
  std::string receptacle_class;
  // Nouns as the text wrote them, articles and plural stripped.
  std::string object_phrase;
  std::string receptacle_phrase;
};

// Natural-language surface of tasks and sub-tasks: goal templates, paraphrase
// frames, noun synonyms, and the parsers that map all of them back to
// structured form. Patterns use {o} (object) and {r} (receptacle) slots.
class Phrasebook {
 public:
  static const Phrasebook& builtin();
  static Phrasebook parse(std::string_view json_text);

  std::string goal_text(TaskType type, std::string_view object, std::string_view receptacle) const;
  std::string subtask_text(const SubTask& s) const;

  const std::vector<std::string>& goal_paraphrases(TaskType type) const;
  const std::vector<std::string>& subtask_paraphrases(SubTaskKind kind) const;
  const std::vector<std::string>& noun_synonyms(std::string_view cls) const;

  // Resolves a noun phrase ("the coffee mug", "spraybottles") to a class
  // name known to `catalog`. Ambiguous synonyms prefer classes in `prefer`.
  std::optional<std::string> resolve_noun(std::string_view phrase, const Catalog& catalog,
                                          const std::vector<std::string>& prefer = {}) const;

  // Rewrites every known synonym phrase in `text` (tokenized, lowercase) to
  // its class name. Ambiguous synonyms prefer classes in `prefer`.
  std::string canonical_nouns(std::string_view text, const std::vector<std::string>& prefer = {}) const;

  // Template goals and every paraphrase frame.
  std::optional<ParsedGoal> parse_goal(std::string_view text, const Catalog& catalog,
                                       const std::vector<std::string>& prefer = {}) const;
  // Canonical sub-task strings and their paraphrases.
  std::optional<SubTask> parse_subtask(std::string_view text, const Catalog& catalog,
                                       const std::vector<std::string>& prefer = {}) const;

 private:
  std::map<TaskType, std::string> goal_templates_;
  std::map<TaskType, std::vector<std::string>> goal_paraphrases_;
  std::map<std::string, std::vector<std::string>, std::less<>> noun_synonyms_;
  std::map<std::string, std::string, std::less<>> subtask_templates_;
  std::map<SubTaskKind, std::vector<std::string>> subtask_paraphrases_;
  std::map<std::string, std::vector<std::string>, std::less<>> synonym_classes_;  // phrase -> classes
  std::size_t longest_synonym_ = 1;                                              // in words
};

// Lowercases, collapses whitespace and strips trailing punctuation.
std::string normalize_phrase(std::string_view text);

}  // namespace pet

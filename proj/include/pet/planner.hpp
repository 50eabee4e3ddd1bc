#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "pet/lm/bridge.hpp"

namespace pet {

inline constexpr std::size_t kMaxSubtaskChars = 128;

enum class PlanSource { oracle, generated, fallback };

struct SubTaskPlan {
  std::vector<std::string> subtasks;
  PlanSource source = PlanSource::generated;
};

struct BankEntry {
  std::string task_text;
  std::vector<std::string> subtasks;
  lm::Vec embedding;
};

// Solved example tasks used as in-context demonstrations.
class ExampleBank {
 public:
  void add(std::string task_text, std::vector<std::string> subtasks, lm::Backend& bridge);
  void add(BankEntry entry) { entries_.push_back(std::move(entry)); }

  const std::vector<BankEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  // Lines of {task_text, subtasks}; embeddings are recomputed on load.
  void save(const std::filesystem::path& path) const;
  static ExampleBank load(const std::filesystem::path& path, lm::Backend& bridge);

 private:
  std::vector<BankEntry> entries_;
};

// Top-k entries by cosine similarity, best first; ties keep bank order.
std::vector<const BankEntry*> retrieve_examples(const ExampleBank& bank, const lm::Vec& query, std::size_t k = 5);

std::string plan_question(const std::string& task_text);
std::string render_plan(const std::vector<std::string>& subtasks);
std::string build_prompt(const std::vector<const BankEntry*>& examples, const std::string& task_text);

struct ParsedPrompt {
  std::vector<std::pair<std::string, std::string>> examples;  // (task text, answer line)
  std::string query;
};
ParsedPrompt split_prompt(const std::string& prompt);

// Splits on commas and newlines, trims, drops empty pieces and caps each
// piece at kMaxSubtaskChars.
std::vector<std::string> parse_plan_text(const std::string& text);

// Falls back to the single sub-task [task_text] when nothing usable comes back.
SubTaskPlan generate_plan(lm::Backend& bridge, const ExampleBank& bank, const std::string& task_text,
                          std::size_t k = 5);

struct PlanMetrics {
  double exact_accuracy = 0;
  double similarity = 0;
};

PlanMetrics evaluate_plans(const std::vector<std::vector<std::string>>& generated,
                           const std::vector<std::vector<std::string>>& ground_truth, lm::Backend& bridge);

}  // namespace pet

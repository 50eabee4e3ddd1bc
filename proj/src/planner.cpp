#include "pet/planner.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "json.hpp"

#include "pet/phrasebook.hpp"
#include "pet/text.hpp"

namespace pet {

namespace {
constexpr std::string_view kQuestion = "What are the middle steps required to ";
}

void ExampleBank::add(std::string task_text, std::vector<std::string> subtasks, lm::Backend& bridge) {
  BankEntry e;
  e.embedding = bridge.embed(task_text);
  e.task_text = std::move(task_text);
  e.subtasks = std::move(subtasks);
  entries_.push_back(std::move(e));
}

void ExampleBank::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (const auto& e : entries_) out << nlohmann::json{{"task_text", e.task_text}, {"subtasks", e.subtasks}}.dump() << '\n';
}

ExampleBank ExampleBank::load(const std::filesystem::path& path, lm::Backend& bridge) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  ExampleBank bank;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line);
    bank.add(j.at("task_text").get<std::string>(), j.at("subtasks").get<std::vector<std::string>>(), bridge);
  }
  return bank;
}

std::vector<const BankEntry*> retrieve_examples(const ExampleBank& bank, const lm::Vec& query, std::size_t k) {
  if (bank.size() < k || bank.size() == 0)
    throw std::invalid_argument("example bank holds " + std::to_string(bank.size()) + " entries, need " +
                                std::to_string(std::max<std::size_t>(k, 1)));
  std::vector<std::pair<double, std::size_t>> scored;
  scored.reserve(bank.size());
  for (std::size_t i = 0; i < bank.size(); ++i) scored.emplace_back(lm::cosine(bank.entries()[i].embedding, query), i);
  std::stable_sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  std::vector<const BankEntry*> out;
  for (std::size_t i = 0; i < k; ++i) out.push_back(&bank.entries()[scored[i].second]);
  return out;
}

std::string plan_question(const std::string& task_text) { return std::string(kQuestion) + task_text + "?"; }

std::string render_plan(const std::vector<std::string>& subtasks) { return join(subtasks, ", "); }

std::string build_prompt(const std::vector<const BankEntry*>& examples, const std::string& task_text) {
  if (examples.empty()) throw std::invalid_argument("build_prompt needs at least one example");
  std::string p;
  for (const auto* e : examples) p += plan_question(e->task_text) + "\n" + render_plan(e->subtasks) + "\n\n";
  p += plan_question(task_text) + "\n";
  return p;
}

ParsedPrompt split_prompt(const std::string& prompt) {
  ParsedPrompt out;
  std::size_t pos = 0;
  auto question_of = [](const std::string& line) {
    if (line.rfind(kQuestion, 0) != 0 || line.empty() || line.back() != '?')
      throw std::invalid_argument("prompt block does not start with a plan question: " + line);
    return line.substr(kQuestion.size(), line.size() - kQuestion.size() - 1);
  };
  while (pos < prompt.size()) {
    auto end = prompt.find("\n\n", pos);
    if (end == std::string::npos) {
      std::string last = prompt.substr(pos);
      while (!last.empty() && last.back() == '\n') last.pop_back();
      out.query = question_of(last);
      return out;
    }
    const std::string block = prompt.substr(pos, end - pos);
    const auto nl = block.find('\n');
    if (nl == std::string::npos) throw std::invalid_argument("example block lacks an answer line");
    out.examples.emplace_back(question_of(block.substr(0, nl)), block.substr(nl + 1));
    pos = end + 2;
  }
  throw std::invalid_argument("prompt has no open question");
}

std::vector<std::string> parse_plan_text(const std::string& text) {
  std::vector<std::string> out;
  for (auto piece : split_any(text, ",\n")) {
    piece = trim(piece);
    if (piece.empty()) continue;
    if (piece.size() > kMaxSubtaskChars) piece.resize(kMaxSubtaskChars);
    out.push_back(std::move(piece));
  }
  return out;
}

SubTaskPlan generate_plan(lm::Backend& bridge, const ExampleBank& bank, const std::string& task_text,
                          std::size_t k) {
  const auto examples = retrieve_examples(bank, bridge.embed(task_text), k);
  const std::string text = bridge.generate(build_prompt(examples, task_text), 128, {"\n\n"});
  auto subtasks = parse_plan_text(text);
  if (subtasks.empty()) {
    std::string t = task_text.substr(0, kMaxSubtaskChars);
    return {{t.empty() ? std::string("finish the task") : t}, PlanSource::fallback};
  }
  return {std::move(subtasks), PlanSource::generated};
}

PlanMetrics evaluate_plans(const std::vector<std::vector<std::string>>& generated,
                           const std::vector<std::vector<std::string>>& ground_truth, lm::Backend& bridge) {
  if (generated.size() != ground_truth.size())
    throw std::invalid_argument("evaluate_plans: " + std::to_string(generated.size()) + " plans vs " +
                                std::to_string(ground_truth.size()) + " references");
  if (generated.empty()) return {};
  auto norm = [](const std::vector<std::string>& plan) {
    std::vector<std::string> out;
    for (const auto& s : plan) out.push_back(normalize_phrase(s));
    return out;
  };
  double exact = 0, sim = 0;
  for (std::size_t i = 0; i < generated.size(); ++i) {
    exact += norm(generated[i]) == norm(ground_truth[i]) ? 1.0 : 0.0;
    sim += lm::cosine(bridge.embed(render_plan(generated[i])), bridge.embed(render_plan(ground_truth[i])));
  }
  const double n = static_cast<double>(generated.size());
  return {exact / n, sim / n};
}

}  // namespace pet

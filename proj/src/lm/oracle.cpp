#include "pet/lm/oracle.hpp"

#include "pet/engine.hpp"
#include "pet/lm/hash_embed.hpp"
#include "pet/text.hpp"

namespace pet::lm {

namespace {

std::optional<std::string> between_last(const std::string& prompt, std::string_view open, std::string_view close) {
  const auto start = prompt.rfind(open);
  if (start == std::string::npos) return std::nullopt;
  const auto from = start + open.size();
  const auto end = prompt.find(close, from);
  if (end == std::string::npos) return std::nullopt;
  return prompt.substr(from, end - from);
}

}  // namespace

std::optional<std::string> extract_plan_query(const std::string& prompt) {
  return between_last(prompt, "What are the middle steps required to ", "?");
}

std::optional<std::string> extract_relevance_task(const std::string& prompt) {
  const auto start = prompt.rfind("Your task is to: ");
  if (start == std::string::npos) return std::nullopt;
  const auto from = start + std::string_view("Your task is to: ").size();
  for (std::string_view q : {". Where should you go to?", ". Which objects will be relevant?"}) {
    const auto end = prompt.find(q, from);
    if (end != std::string::npos) return prompt.substr(from, end - from);
  }
  return std::nullopt;
}

std::optional<std::string> extract_finish_query(const std::string& prompt) {
  return between_last(prompt, "Did you finish the task of ", "?");
}

OracleBackend::OracleBackend(OracleConfig config, std::shared_ptr<EpisodeTruth> truth)
    : config_(config), truth_(std::move(truth)), rng_(config.rng_seed) {
  if (truth_) prefer_ = truth_->scene_classes();
}

// Classes never change during an episode, so the list is taken once.
const std::vector<std::string>& OracleBackend::preferred_classes() const { return prefer_; }

std::string OracleBackend::generate(const std::string& prompt, int /*max_tokens*/,
                                    const std::vector<std::string>& stop) {
  const auto query = extract_plan_query(prompt);
  if (!query) return "";
  const Catalog& catalog = truth_ ? *truth_->catalog : Catalog::builtin();
  const Phrasebook& pb = truth_ ? *truth_->phrasebook : Phrasebook::builtin();
  const auto goal = pb.parse_goal(*query, catalog, preferred_classes());
  if (!goal) return "";
  TaskSpec task{goal->type, goal->object_class, goal->receptacle_class, *query, 0};
  const auto structured = decompose(task);
  // Like a language model, the oracle echoes the nouns the query used.
  std::vector<std::string> plan;
  for (auto s : structured) {
    if (s.object_class == goal->object_class) s.object_class = goal->object_phrase;
    if (s.receptacle_class == goal->receptacle_class) s.receptacle_class = goal->receptacle_phrase;
    plan.push_back(pb.subtask_text(s));
  }

  std::lock_guard lock(mu_);
  if (config_.noise_epsilon > 0 && rng_.chance(config_.noise_epsilon)) {
    const std::size_t i = rng_.below(plan.size());
    const auto& frames = pb.subtask_paraphrases(structured[i].kind);
    if (!frames.empty())
      plan[i] = fill(fill(rng_.pick(frames), "o", goal->object_phrase), "r", goal->receptacle_phrase);
  }
  return truncate_at_stop(join(plan, ", "), stop);
}

double OracleBackend::score_choice(const std::string& prompt, const std::string& candidate) {
  double score = 0.5;
  const auto text = extract_relevance_task(prompt);
  if (truth_ && text) {
    const auto prefer = preferred_classes();
    const auto& pb = *truth_->phrasebook;
    std::optional<std::set<std::string>> relevant;
    if (auto s = pb.parse_subtask(*text, *truth_->catalog, prefer)) {
      relevant = truth_->relevant_for_subtask(*s);
    } else if (auto g = pb.parse_goal(*text, *truth_->catalog, prefer)) {
      if (g->type == truth_->task.type && g->object_class == truth_->task.object_class &&
          g->receptacle_class == truth_->task.receptacle_class) {
        relevant = truth_->relevant_for_task();
      } else {
        EpisodeTruth other = *truth_;
        other.task = TaskSpec{g->type, g->object_class, g->receptacle_class, *text, 0};
        other.demo = {};
        relevant = other.relevant_for_task();
      }
    }
    if (relevant) score = relevant->count(normalize_phrase(candidate)) ? 1.0 : 0.0;
  }
  std::lock_guard lock(mu_);
  if (config_.noise_epsilon > 0 && rng_.chance(config_.noise_epsilon)) score = rng_.chance(0.5) ? 1.0 : 0.0;
  return score;
}

YesNo OracleBackend::yes_no(const std::string& prompt) {
  const auto text = extract_finish_query(prompt);
  if (!truth_ || !text) return {0.5, 0.5};
  const auto prefer = preferred_classes();
  const auto& pb = *truth_->phrasebook;
  bool yes = false;
  std::string place_key;
  if (auto s = pb.parse_subtask(*text, *truth_->catalog, prefer)) {
    int ordinal = 1;
    if (s->kind == SubTaskKind::place) {
      place_key = pb.subtask_text(*s);
      std::lock_guard lock(mu_);
      ordinal = place_yes_[place_key] + 1;
    }
    yes = subtask_satisfied(truth_->state, *s, ordinal);
  } else if (auto g = pb.parse_goal(*text, *truth_->catalog, prefer)) {
    yes = goal_satisfied(truth_->state, TaskSpec{g->type, g->object_class, g->receptacle_class, *text, 0});
  } else {
    return {0.5, 0.5};
  }
  std::lock_guard lock(mu_);
  if (yes && config_.noise_epsilon > 0 && rng_.chance(config_.noise_epsilon)) yes = false;
  if (yes && !place_key.empty()) ++place_yes_[place_key];
  return yes ? YesNo{1.0, 0.0} : YesNo{0.0, 1.0};
}

Vec OracleBackend::embed(const std::string& text) {
  if (!truth_) return lexical_embed(text, config_.embed_dim);
  return lexical_embed(text, config_.embed_dim, *truth_->phrasebook, prefer_);
}

}  // namespace pet::lm

#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>

#include "pet/lm/bridge.hpp"
#include "pet/lm/truth.hpp"
#include "pet/rng.hpp"

namespace pet::lm {

struct OracleConfig {
  double noise_epsilon = 0.0;
  std::uint64_t rng_seed = 0;
  int embed_dim = 64;
};

// Ground-truth stand-in for the language models. Answers come from the
// episode truth; noise_epsilon perturbs them:
//  - generate: one sub-task is rewritten with a paraphrase,
//  - score_choice: the score is replaced by a fair coin,
//  - yes_no: a true "Yes" is reported as "No" (a miss).
// Plan generation works without truth (it only needs the goal text).
class OracleBackend : public Backend {
 public:
  explicit OracleBackend(OracleConfig config, std::shared_ptr<EpisodeTruth> truth = nullptr);

  std::string generate(const std::string& prompt, int max_tokens, const std::vector<std::string>& stop) override;
  double score_choice(const std::string& prompt, const std::string& candidate) override;
  YesNo yes_no(const std::string& prompt) override;
  Vec embed(const std::string& text) override;

  const std::shared_ptr<EpisodeTruth>& truth() const { return truth_; }

 private:
  const std::vector<std::string>& preferred_classes() const;

  OracleConfig config_;
  std::shared_ptr<EpisodeTruth> truth_;
  std::vector<std::string> prefer_;
  std::mutex mu_;
  Rng rng_;
  std::map<std::string, int> place_yes_;  // canonical place text -> Yes answers so far
};

// Prompt pieces the oracle reads back. Each returns the slot text of the
// last matching question, if any.
std::optional<std::string> extract_plan_query(const std::string& prompt);
std::optional<std::string> extract_relevance_task(const std::string& prompt);
std::optional<std::string> extract_finish_query(const std::string& prompt);

}  // namespace pet::lm

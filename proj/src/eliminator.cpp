#include "pet/eliminator.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>

#include <spdlog/spdlog.h>

#include "pet/text.hpp"

namespace pet {

std::pair<std::string, std::string> relevance_prompts(const std::string& task_text) {
  return {"Your task is to: " + task_text + ". Where should you go to?",
          "Your task is to: " + task_text + ". Which objects will be relevant?"};
}

namespace {

std::string class_of(const std::string& name) {
  const auto sp = name.find(' ');
  return sp == std::string::npos ? name : name.substr(0, sp);
}

}  // namespace

std::vector<MaskDecision> score_entities(lm::Backend& bridge, const std::string& conditioning_text,
                                         const Observation& obs, const EliminatorConfig& config) {
  const auto [recep_prompt, object_prompt] = relevance_prompts(conditioning_text);
  std::vector<MaskDecision> out;
  auto decide = [&](const std::string& name, EntityKind kind) {
    MaskDecision d;
    d.entity = name;
    d.kind = kind;
    d.threshold = kind == EntityKind::receptacle ? config.tau_r : config.tau_o;
    try {
      d.score = bridge.score_choice(kind == EntityKind::receptacle ? recep_prompt : object_prompt, name);
    } catch (const std::exception& e) {
      spdlog::warn("relevance scoring failed for '{}', keeping it: {}", name, e.what());
      d.score = 1.0;
    }
    d.guarded = config.guard && contains_token(conditioning_text, class_of(name));
    d.kept = d.score >= d.threshold || d.guarded;
    out.push_back(std::move(d));
  };
  for (const auto& r : obs.receptacles) decide(r, EntityKind::receptacle);
  for (const auto& o : obs.objects) decide(o, EntityKind::object);
  return out;
}

Observation mask_observation(const Observation& obs, const std::vector<MaskDecision>& decisions) {
  std::set<std::string> drop;
  for (const auto& d : decisions)
    if (!d.kept) drop.insert(d.entity);
  const auto protected_names = find_entity_names(obs.preamble);
  for (const auto& n : protected_names) drop.erase(n);
  if (drop.empty()) return obs;

  Observation out = obs;
  auto keep = [&](const std::string& n) { return drop.count(n) == 0; };
  out.listed.clear();
  std::copy_if(obs.listed.begin(), obs.listed.end(), std::back_inserter(out.listed), keep);
  out.receptacles.clear();
  std::copy_if(obs.receptacles.begin(), obs.receptacles.end(), std::back_inserter(out.receptacles), keep);
  out.objects.clear();
  std::copy_if(obs.objects.begin(), obs.objects.end(), std::back_inserter(out.objects), keep);
  out.text = out.has_listing ? out.preamble + " " + listing_phrase(out.listed) + "." : out.preamble;
  return out;
}

namespace {

void check_labels(const std::vector<double>& scores, const std::vector<int>& labels) {
  if (scores.size() != labels.size()) throw std::invalid_argument("scores and labels differ in length");
  std::size_t pos = 0;
  for (int l : labels) pos += l != 0;
  if (pos == 0 || pos == labels.size()) throw std::domain_error("AUC undefined: labels are all of one class");
}

}  // namespace

double evaluate_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
  check_labels(scores, labels);
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  std::vector<double> rank(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double mid = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) rank[order[k]] = mid;
    i = j + 1;
  }
  double pos = 0, rank_sum = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (labels[i]) {
      pos += 1;
      rank_sum += rank[i];
    }
  const double neg = static_cast<double>(n) - pos;
  return (rank_sum - pos * (pos + 1) / 2.0) / (pos * neg);
}

std::vector<std::pair<double, double>> roc_curve(const std::vector<double>& scores, const std::vector<int>& labels) {
  check_labels(scores, labels);
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  double P = 0, N = 0;
  for (int l : labels) (l ? P : N) += 1;
  std::vector<std::pair<double, double>> pts{{0.0, 0.0}};
  double tp = 0, fp = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    (labels[order[i]] ? tp : fp) += 1;
    if (i + 1 == order.size() || scores[order[i + 1]] != scores[order[i]]) pts.emplace_back(fp / N, tp / P);
  }
  return pts;
}

}  // namespace pet

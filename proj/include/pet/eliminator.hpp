#pragma once

#include <string>
#include <utility>
#include <vector>

#include "pet/engine.hpp"
#include "pet/lm/bridge.hpp"

namespace pet {

enum class EntityKind { receptacle, object };

struct MaskDecision {
  std::string entity;
  EntityKind kind = EntityKind::object;
  double score = 1.0;
  double threshold = 0.4;
  // Kept because its class is named in the conditioning text.
  bool guarded = false;
  // score >= threshold, or guarded.
  bool kept = true;
};

struct EliminatorConfig {
  double tau_o = 0.4;
  double tau_r = 0.4;
  bool guard = true;
};

std::pair<std::string, std::string> relevance_prompts(const std::string& task_text);

// One decision per entity of the observation, receptacles first. Backend
// errors keep the entity.
std::vector<MaskDecision> score_entities(lm::Backend& bridge, const std::string& conditioning_text,
                                         const Observation& obs, const EliminatorConfig& config = {});

// Removes entities whose decision is not kept from the listing and re-renders
// the text. Entities named in the preamble always stay.
Observation mask_observation(const Observation& obs, const std::vector<MaskDecision>& decisions);

// Rank-sum AUC with midranks for ties. Throws std::domain_error when the
// labels are all of one class.
double evaluate_auc(const std::vector<double>& scores, const std::vector<int>& labels);

// ROC points (fpr, tpr) from the highest threshold down, starting at (0,0).
std::vector<std::pair<double, double>> roc_curve(const std::vector<double>& scores, const std::vector<int>& labels);

}  // namespace pet

#pragma once

#include <string>
#include <vector>

#include "pet/agent/policy.hpp"
#include "pet/lm/bridge.hpp"
#include "pet/rng.hpp"

namespace pet::agent {

enum class ActMode { greedy, sample };

// Argmax with ties going to the lowest index.
int greedy_index(const Vec& policy);
// Inverse-CDF draw.
int sample_index(const Vec& policy, Rng& rng);

Vec to_eigen(const lm::Vec& v);

struct ActResult {
  int index = 0;
  Vec policy;
};

// Scores `actions` given the conditioning text, past observation embeddings
// and the current observation text.
ActResult act(const PolicyParams& params, lm::Backend& bridge, const std::string& conditioning,
              const std::vector<Vec>& history, const std::string& observation, const std::vector<std::string>& actions,
              ActMode mode = ActMode::greedy, Rng* rng = nullptr);

}  // namespace pet::agent

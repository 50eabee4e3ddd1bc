#include "pet/agent/actor.hpp"

#include <stdexcept>

namespace pet::agent {

int greedy_index(const Vec& policy) {
  if (policy.size() == 0) throw std::invalid_argument("empty policy");
  int best = 0;
  for (int i = 1; i < policy.size(); ++i)
    if (policy(i) > policy(best)) best = i;
  return best;
}

int sample_index(const Vec& policy, Rng& rng) {
  if (policy.size() == 0) throw std::invalid_argument("empty policy");
  const double u = rng.uniform() * policy.sum();
  double acc = 0;
  for (int i = 0; i < policy.size(); ++i) {
    acc += policy(i);
    if (u < acc) return i;
  }
  return static_cast<int>(policy.size()) - 1;
}

Vec to_eigen(const lm::Vec& v) { return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size())); }

ActResult act(const PolicyParams& params, lm::Backend& bridge, const std::string& conditioning,
              const std::vector<Vec>& history, const std::string& observation, const std::vector<std::string>& actions,
              ActMode mode, Rng* rng) {
  if (actions.empty()) throw std::invalid_argument("act: no permissible actions");
  const int D = params.config.embed_dim;
  AgentInput in;
  in.task = to_eigen(bridge.embed(conditioning));
  in.history = history_average(history, D);
  in.obs = to_eigen(bridge.embed(observation));
  in.actions.resize(static_cast<Eigen::Index>(actions.size()), D);
  for (std::size_t i = 0; i < actions.size(); ++i) in.actions.row(static_cast<Eigen::Index>(i)) = to_eigen(bridge.embed(actions[i])).transpose();
  ActResult r;
  r.policy = forward(params, in);
  if (mode == ActMode::greedy) {
    r.index = greedy_index(r.policy);
  } else {
    if (!rng) throw std::invalid_argument("act: sample mode needs a generator");
    r.index = sample_index(r.policy, *rng);
  }
  return r;
}

}  // namespace pet::agent

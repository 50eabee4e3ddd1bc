#include "pet/harness/dataset.hpp"

#include <algorithm>
#include <stdexcept>

#include "pet/agent/actor.hpp"
#include "pet/lm/truth.hpp"
#include "pet/rng.hpp"

namespace pet::harness {

std::vector<agent::Sample> build_samples(const std::vector<Scene>& scenes, const PipelineFlags& flags,
                                         const BackendFactory& factory, const EliminatorConfig& eliminate) {
  std::vector<agent::Sample> out;
  for (const auto& scene : scenes) {
    auto truth = std::make_shared<lm::EpisodeTruth>(lm::EpisodeTruth::from_scene(scene.state, scene.task));
    if (!truth->demo.solved) throw std::runtime_error("expert failed on training scene " + std::to_string(scene.seed));
    auto bridge = factory(truth, mix_seed(scene.seed, 0x7a11 + static_cast<std::uint64_t>(scene.variant)));
    const auto& demo = truth->demo;
    const int D = static_cast<int>(bridge->embed("").size());

    WorldState state = demo.initial;
    std::vector<agent::Vec> history;
    for (const auto& st : demo.steps) {
      truth->state = state;
      const std::string cond =
          flags.track ? demo.subtask_plan.at(static_cast<std::size_t>(st.subtask_index - 1)) : scene.task.goal_text;
      Observation fed = st.observation;
      if (flags.eliminate) fed = mask_observation(st.observation, score_entities(*bridge, cond, st.observation, eliminate));

      agent::Sample s;
      s.input.task = agent::to_eigen(bridge->embed(cond));
      s.input.history = agent::history_average(history, D);
      s.input.obs = agent::to_eigen(bridge->embed(fed.text));
      s.input.actions.resize(static_cast<Eigen::Index>(st.permissible.size()), D);
      for (std::size_t i = 0; i < st.permissible.size(); ++i)
        s.input.actions.row(static_cast<Eigen::Index>(i)) = agent::to_eigen(bridge->embed(st.permissible[i])).transpose();
      const auto it = std::find(st.permissible.begin(), st.permissible.end(), st.action.text());
      if (it == st.permissible.end()) throw std::logic_error("expert action missing from the permissible list");
      s.target = static_cast<int>(it - st.permissible.begin());
      out.push_back(std::move(s));

      history.push_back(out.back().input.obs);
      state = step(state, scene.task, st.action).state;
    }
  }
  return out;
}

}  // namespace pet::harness

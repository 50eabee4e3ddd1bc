#pragma once

#include <vector>

#include "pet/agent/trainer.hpp"
#include "pet/eliminator.hpp"
#include "pet/expert.hpp"
#include "pet/harness/trajectory.hpp"
#include "pet/scene.hpp"
#include "pet/tracker.hpp"

namespace pet::harness {

// Behaviour-cloning samples from expert demonstrations of `scenes`. With
// tracking on, each step is conditioned on the ground-truth sub-task active
// at that step; otherwise on the goal text. With elimination on, the
// observation is masked by the backend the factory returns.
std::vector<agent::Sample> build_samples(const std::vector<Scene>& scenes, const PipelineFlags& flags,
                                         const BackendFactory& factory, const EliminatorConfig& eliminate = {});

}  // namespace pet::harness

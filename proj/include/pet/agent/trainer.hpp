#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "pet/agent/policy.hpp"

namespace pet::agent {

struct Sample {
  AgentInput input;
  int target = 0;
};

struct TrainConfig {
  int epochs = 30;
  double lr = 1e-2;
  double momentum = 0.9;
  int batch_size = 8;
  double grad_clip = 5.0;  // global norm; <= 0 disables
  std::uint64_t shuffle_seed = 7;
};

struct TrainResult {
  PolicyParams params;
  std::vector<double> epoch_loss;      // mean loss over the epoch, as trained
  std::vector<double> epoch_accuracy;  // argmax accuracy seen during the epoch
};

class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using EpochCallback = std::function<void(int epoch, double loss, double accuracy)>;

// Mini-batch SGD with momentum on the cross-entropy of the expert action.
TrainResult train_bc(const std::vector<Sample>& samples, PolicyParams params, const TrainConfig& config,
                     const EpochCallback& on_epoch = {});

// Fraction of samples whose greedy choice is the target.
double action_accuracy(const PolicyParams& params, const std::vector<Sample>& samples);

}  // namespace pet::agent

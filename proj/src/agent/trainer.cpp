#include "pet/agent/trainer.hpp"

#include <cmath>
#include <numeric>

#include "pet/agent/actor.hpp"
#include "pet/rng.hpp"

namespace pet::agent {

TrainResult train_bc(const std::vector<Sample>& samples, PolicyParams params, const TrainConfig& config,
                     const EpochCallback& on_epoch) {
  if (samples.empty()) throw std::invalid_argument("train_bc: no training samples");
  if (config.batch_size < 1) throw std::invalid_argument("train_bc: batch size must be positive");
  TrainResult out;
  const std::size_t P = params.values.size();
  Buffer grad(P), velocity(P, 0.0);
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(config.shuffle_seed);
  ForwardCache cache;
  long step = 0;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order);
    double loss_sum = 0;
    std::size_t correct = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      std::fill(grad.begin(), grad.end(), 0.0);
      for (std::size_t i = start; i < end; ++i) {
        const auto& s = samples[order[i]];
        const Vec& pi = forward(params, s.input, &cache);
        correct += greedy_index(pi) == s.target;
        const double loss = backward(params, cache, s.target, grad);
        if (!std::isfinite(loss)) throw TrainingError("non-finite loss at step " + std::to_string(step));
        loss_sum += loss;
      }
      const double inv = 1.0 / static_cast<double>(end - start);
      double norm = 0;
      for (auto& g : grad) {
        g *= inv;
        norm += g * g;
      }
      norm = std::sqrt(norm);
      const double clip = config.grad_clip > 0 && norm > config.grad_clip ? config.grad_clip / norm : 1.0;
      for (std::size_t k = 0; k < P; ++k) {
        velocity[k] = config.momentum * velocity[k] + grad[k] * clip;
        params.values[k] -= config.lr * velocity[k];
      }
      ++step;
    }
    const double mean_loss = loss_sum / static_cast<double>(samples.size());
    const double acc = static_cast<double>(correct) / static_cast<double>(samples.size());
    if (!std::isfinite(mean_loss)) throw TrainingError("non-finite loss at step " + std::to_string(step));
    out.epoch_loss.push_back(mean_loss);
    out.epoch_accuracy.push_back(acc);
    if (on_epoch) on_epoch(epoch, mean_loss, acc);
  }
  out.params = std::move(params);
  return out;
}

double action_accuracy(const PolicyParams& params, const std::vector<Sample>& samples) {
  if (samples.empty()) return 0.0;
  std::size_t correct = 0;
  for (const auto& s : samples) correct += greedy_index(forward(params, s.input)) == s.target;
  return static_cast<double>(correct) / static_cast<double>(samples.size());
}

}  // namespace pet::agent

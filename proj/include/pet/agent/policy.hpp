#pragma once

#include <stdexcept>
#include <vector>

#include "pet/agent/params.hpp"

namespace pet::agent {

struct AgentInput {
  Vec task;     // Embed(T) or Embed(s_p)
  Vec history;  // mean of past observation embeddings
  Vec obs;      // Embed(O^t)
  Mat actions;  // n x D, one row per permissible action
};

// Mean of past embeddings; zero vector of size `dim` when there are none.
Vec history_average(const std::vector<Vec>& past, int dim);

class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, int layer) : std::runtime_error(what), layer_(layer) {}
  int layer() const { return layer_; }

 private:
  int layer_;
};

// Activations kept for the backward pass.
struct ForwardCache {
  struct Norm {
    Mat xhat;
    Vec rstd;
  };
  struct Layer {
    Mat x_in;
    Norm ln1;
    Mat a, q, k, v;
    std::vector<Mat> probs;  // per segment, per head
    Mat ctx;
    Mat x_mid;
    Norm ln2;
    Mat b, h_pre, h_act;
  };
  Mat tokens;  // N x D input rows
  std::vector<int> slot;  // 0..2 context slot, 3 action
  std::vector<std::pair<int, int>> segments;  // (first row, length)
  std::vector<Layer> layers;
  Mat x_last;
  Norm lnf;
  Mat xf;
  Vec q;
  Mat k;  // n x M
  Vec scores;
  Vec policy;              // in sorted action order
  std::vector<int> order;  // order[k]: caller's index of sorted action k
};

// Action-attention forward pass. The query is read at the observation slot
// of [T, H, O, a_1..a_n]; key i at the action slot of [T, H, O, a_i]. Action
// slots carry a shared type vector and no position, so permuting the
// actions permutes the policy, bit for bit.
Vec forward(const PolicyParams& params, const AgentInput& input, ForwardCache* cache = nullptr);

// Adds d(-log pi[expert])/d(params) into `grad` (size params.values.size())
// and returns the loss.
double backward(const PolicyParams& params, const ForwardCache& cache, int expert_index, Buffer& grad);

}  // namespace pet::agent

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace pet::agent {

using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vec = Eigen::VectorXd;
using MatMap = Eigen::Map<Mat>;
using ConstMatMap = Eigen::Map<const Mat>;
// Flat parameter/gradient storage. Aligned so that vectorised reductions over
// mapped tensors take the same path on every run, whatever the heap layout.
using Buffer = std::vector<double, Eigen::aligned_allocator<double>>;

struct PolicyConfig {
  int layers = 2;
  int heads = 4;
  int hidden = 64;     // M
  int embed_dim = 64;  // D
  int ffn = 128;
  std::uint64_t init_seed = 1;

  void validate() const;
  bool operator==(const PolicyConfig&) const = default;
};

struct TensorInfo {
  std::string name;
  int rows = 0;
  int cols = 0;
  std::size_t offset = 0;
  std::size_t size() const { return static_cast<std::size_t>(rows) * cols; }
};

// Offsets of every tensor inside the flat parameter (or gradient) buffer.
struct Layout {
  struct Layer {
    std::size_t ln1_g, ln1_b, wq, bq, wk, bk, wv, bv, wo, bo, ln2_g, ln2_b, w1, b1, w2, b2;
  };
  std::size_t w_in, b_in, pos, act;
  std::vector<Layer> layer;
  std::size_t lnf_g, lnf_b, head_q_w, head_q_b, head_k_w, head_k_b;
  std::vector<TensorInfo> tensors;
  std::size_t total = 0;

  static Layout build(const PolicyConfig& c);
  const TensorInfo& find(const std::string& name) const;
};

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// All trainable tensors in one buffer; gradients use the same layout.
struct PolicyParams {
  PolicyConfig config;
  Layout layout;
  Buffer values;

  static PolicyParams init(const PolicyConfig& config);
  static PolicyParams zeros(const PolicyConfig& config);

  MatMap tensor(const std::string& name);
  ConstMatMap tensor(const std::string& name) const;

  bool all_finite() const;

  // Text checkpoint: header, config line, then per tensor a
  // "tensor name rows cols" line followed by its rows.
  void save(const std::filesystem::path& path) const;
  static PolicyParams load(const std::filesystem::path& path);
};

}  // namespace pet::agent

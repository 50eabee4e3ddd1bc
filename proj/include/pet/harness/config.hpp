#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>

#include "pet/agent/params.hpp"
#include "pet/agent/trainer.hpp"
#include "pet/eliminator.hpp"
#include "pet/lm/cache_backend.hpp"
#include "pet/lm/http_backend.hpp"
#include "pet/lm/oracle.hpp"
#include "pet/scene.hpp"
#include "pet/tracker.hpp"

namespace pet::harness {

struct SplitConfig {
  int train = 140;
  int seen = 40;
  int unseen = 40;
  std::uint64_t seed_base = 0;
  std::uint64_t unseen_offset = 1000000;
  int max_variants = 8;  // task redraws per train room when building the seen split
};

struct LmConfig {
  std::string backend = "oracle";  // oracle | http
  double noise_epsilon = 0.0;
  std::uint64_t rng_seed = 11;
  int embed_dim = 64;
  lm::HttpConfig http;
  std::string cache_path;          // wraps the http backend when set
  std::string cache_mode = "record";
};

struct EvalConfig {
  int step_budget = 50;
  int workers = 1;
  int seeds = 3;
  int plan_k = 5;
  double perturb_rate = 1.0;  // fraction of goals perturbed in generalization runs
};

// Every tunable of a run. Loaded from a sectioned key=value file; unknown
// keys are rejected so typos do not pass silently.
struct RunConfig {
  SceneConfig scene;
  SplitConfig splits;
  LmConfig lm;
  EliminatorConfig eliminate;
  agent::PolicyConfig policy{2, 4, 32, 64, 64, 1};
  agent::TrainConfig train{40, 1e-2, 0.9, 8, 5.0, 7};
  EvalConfig eval;

  static RunConfig load(const std::filesystem::path& path);
  static RunConfig parse(const std::string& text);
  // "section.key" override, validated like a file entry.
  void set(const std::string& dotted_key, const std::string& value);
  void validate() const;
  std::string dump() const;  // resolved config in the same format
  std::string hash() const;
};

// Makes the per-episode language-model backend described by `lm`.
BackendFactory make_backend_factory(const LmConfig& lm);

}  // namespace pet::harness

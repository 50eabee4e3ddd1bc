#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "pet/agent/trainer.hpp"
#include "pet/harness/config.hpp"
#include "pet/harness/episode.hpp"
#include "pet/harness/splits.hpp"

namespace pet::harness {

struct AblationRow {
  std::string name;
  PipelineFlags flags;
};

// base, eliminate, plan_track, pet
const std::vector<AblationRow>& ablation_rows();
const AblationRow& row_by_name(const std::string& name);

// Runs fn(0..n-1) on up to `workers` threads. The first exception is
// rethrown after all workers stop.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn);

// Goals and ground-truth plans of the training scenes.
ExampleBank build_bank(const std::vector<Scene>& train, lm::Backend& embedder);

struct TrainedRow {
  std::string row;
  int seed = 0;
  agent::TrainResult result;
};

TrainedRow train_row(const std::vector<Scene>& train, const AblationRow& row, int seed, const RunConfig& config,
                     const BackendFactory& factory, const agent::EpochCallback& on_epoch = {});

struct SplitRun {
  std::string split;
  std::string row;
  int seed = 0;
  const agent::PolicyParams* params = nullptr;  // null plays a random agent
  PipelineFlags flags;
  const ExampleBank* bank = nullptr;
  double perturb_rate = 0;  // fraction of goals perturbed
};

std::vector<Trajectory> run_split(const std::vector<Scene>& scenes, const SplitRun& run, const RunConfig& config,
                                  const BackendFactory& factory);

struct CompletionCell {
  std::string row;
  std::string split;
  std::map<int, double> per_seed;
  double mean = 0;
  double mean_steps = 0;          // over all episodes
  double mean_success_steps = 0;  // over completed episodes
  int episodes = 0;
};

struct AucCell {
  std::optional<double> receptacles;
  std::optional<double> objects;
};

struct EvalReport {
  std::string config_hash;
  std::vector<CompletionCell> completion;
  std::map<std::string, double> plan_accuracy;    // per row with planning
  std::map<std::string, double> plan_similarity;
  std::map<std::string, AucCell> eliminate_auc;   // per task type
  std::optional<TrackerMetrics> track;

  const CompletionCell* cell(const std::string& row, const std::string& split) const;
  nlohmann::json to_json() const;
  std::string table() const;
};

// Everything comes from the trajectories; nothing is re-run.
EvalReport report_from_trajectories(const std::vector<Trajectory>& trajectories, const std::string& config_hash,
                                    int embed_dim = 64);

// Entity relevance over expert demonstrations: AUC per task type against the
// entities the task needs, and the mean fraction of listed entities a
// masking pass removes.
struct EliminateStudy {
  std::map<std::string, AucCell> auc;
  AucCell pooled;
  double removed_fraction = 0;
  int observations = 0;
};

// Same backends, but relevance scores are uniform draws.
BackendFactory random_scorer_factory(BackendFactory inner, std::uint64_t seed);

EliminateStudy eliminate_study(const std::vector<Scene>& scenes, const BackendFactory& factory,
                               const EliminatorConfig& config, bool subtask_conditioning = true);

}  // namespace pet::harness

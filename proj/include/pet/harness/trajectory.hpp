#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "pet/eliminator.hpp"
#include "pet/engine.hpp"
#include "pet/task.hpp"
#include "pet/world.hpp"

namespace pet::harness {

struct PipelineFlags {
  bool plan = false;
  bool eliminate = false;
  bool track = false;

  bool operator==(const PipelineFlags&) const = default;
};

struct TrajectoryHeader {
  std::string row;    // ablation row name, free-form
  std::string split;
  int run_seed = 0;
  std::string config_hash;
  std::uint64_t scene_seed = 0;
  int variant = 0;
  TaskSpec task;
  std::string goal_text;  // what the pipeline was told, possibly perturbed
  WorldState initial;
  PipelineFlags flags;
  std::vector<std::string> plan;
  std::vector<std::string> relevant;  // entities that matter for the task
};

struct StepRecord {
  int t = 0;
  Observation raw;
  Observation fed;  // what the agent saw
  std::string conditioning;
  int subtask_index = 0;  // tracker pointer before this step; 0 when tracking is off
  bool tracker_queried = false;
  bool tracker_incremented = false;
  double p_yes = 0;
  std::vector<MaskDecision> decisions;
  std::vector<std::string> permissible;
  std::string action;
  bool done = false;
};

struct Trajectory {
  TrajectoryHeader header;
  std::vector<StepRecord> steps;
  bool done = false;
  // Tracker view of the observation that followed the last action.
  int final_subtask_index = 0;
  bool plan_finished = false;
};

void write_trajectory(std::ostream& out, const Trajectory& t);
void write_trajectory(const std::filesystem::path& path, const Trajectory& t);
Trajectory read_trajectory(std::istream& in);
Trajectory read_trajectory(const std::filesystem::path& path);

// Steps the engine from the header's initial state with the recorded
// actions. Returns an empty string when every raw observation and the done
// flag come back byte-identical, otherwise a description of the first
// mismatch.
std::string replay_mismatch(const Trajectory& t);

}  // namespace pet::harness

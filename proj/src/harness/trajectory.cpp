#include "pet/harness/trajectory.hpp"

#include <fstream>
#include <stdexcept>

#include "pet/action.hpp"
#include "pet/json_io.hpp"

namespace pet {

void to_json(json& j, const MaskDecision& d) {
  j = json{{"entity", d.entity},
           {"kind", d.kind == EntityKind::object ? "object" : "receptacle"},
           {"score", d.score},
           {"threshold", d.threshold},
           {"guarded", d.guarded},
           {"kept", d.kept}};
}

void from_json(const json& j, MaskDecision& d) {
  d.entity = j.at("entity").get<std::string>();
  d.kind = j.at("kind").get<std::string>() == "object" ? EntityKind::object : EntityKind::receptacle;
  d.score = j.at("score").get<double>();
  d.threshold = j.at("threshold").get<double>();
  d.guarded = j.at("guarded").get<bool>();
  d.kept = j.at("kept").get<bool>();
}

}  // namespace pet

namespace pet::harness {

namespace {

json flags_json(const PipelineFlags& f) { return json{{"plan", f.plan}, {"eliminate", f.eliminate}, {"track", f.track}}; }

PipelineFlags flags_from(const json& j) {
  return {j.at("plan").get<bool>(), j.at("eliminate").get<bool>(), j.at("track").get<bool>()};
}

}  // namespace

void write_trajectory(std::ostream& out, const Trajectory& t) {
  const auto& h = t.header;
  json head{{"record", "header"},      {"row", h.row},         {"split", h.split},
            {"run_seed", h.run_seed},  {"config_hash", h.config_hash},
            {"scene_seed", h.scene_seed}, {"variant", h.variant}, {"task", h.task},
            {"goal_text", h.goal_text}, {"initial", h.initial}, {"flags", flags_json(h.flags)},
            {"plan", h.plan},          {"relevant", h.relevant}};
  out << head.dump() << '\n';
  for (const auto& s : t.steps) {
    json j{{"record", "step"},
           {"t", s.t},
           {"raw", s.raw},
           {"fed", s.fed},
           {"conditioning", s.conditioning},
           {"subtask_index", s.subtask_index},
           {"tracker_queried", s.tracker_queried},
           {"tracker_incremented", s.tracker_incremented},
           {"p_yes", s.p_yes},
           {"decisions", s.decisions},
           {"permissible", s.permissible},
           {"action", s.action},
           {"done", s.done}};
    out << j.dump() << '\n';
  }
  json end{{"record", "end"},
           {"done", t.done},
           {"steps", t.steps.size()},
           {"final_subtask_index", t.final_subtask_index},
           {"plan_finished", t.plan_finished}};
  out << end.dump() << '\n';
}

void write_trajectory(const std::filesystem::path& path, const Trajectory& t) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_trajectory(out, t);
}

Trajectory read_trajectory(std::istream& in) {
  Trajectory t;
  std::string line;
  bool have_header = false, have_end = false;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (have_end) throw std::runtime_error("trajectory: data after end record (line " + std::to_string(lineno) + ")");
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw std::runtime_error("trajectory: line " + std::to_string(lineno) + ": " + e.what());
    }
    const auto kind = j.at("record").get<std::string>();
    if (!have_header) {
      if (kind != "header") throw std::runtime_error("trajectory: first record must be the header");
      auto& h = t.header;
      h.row = j.at("row").get<std::string>();
      h.split = j.at("split").get<std::string>();
      h.run_seed = j.at("run_seed").get<int>();
      h.config_hash = j.at("config_hash").get<std::string>();
      h.scene_seed = j.at("scene_seed").get<std::uint64_t>();
      h.variant = j.at("variant").get<int>();
      h.task = j.at("task").get<TaskSpec>();
      h.goal_text = j.at("goal_text").get<std::string>();
      h.initial = j.at("initial").get<WorldState>();
      h.flags = flags_from(j.at("flags"));
      h.plan = j.at("plan").get<std::vector<std::string>>();
      h.relevant = j.at("relevant").get<std::vector<std::string>>();
      have_header = true;
    } else if (kind == "step") {
      StepRecord s;
      s.t = j.at("t").get<int>();
      s.raw = j.at("raw").get<Observation>();
      s.fed = j.at("fed").get<Observation>();
      s.conditioning = j.at("conditioning").get<std::string>();
      s.subtask_index = j.at("subtask_index").get<int>();
      s.tracker_queried = j.at("tracker_queried").get<bool>();
      s.tracker_incremented = j.at("tracker_incremented").get<bool>();
      s.p_yes = j.at("p_yes").get<double>();
      s.decisions = j.at("decisions").get<std::vector<MaskDecision>>();
      s.permissible = j.at("permissible").get<std::vector<std::string>>();
      s.action = j.at("action").get<std::string>();
      s.done = j.at("done").get<bool>();
      t.steps.push_back(std::move(s));
    } else if (kind == "end") {
      t.done = j.at("done").get<bool>();
      t.final_subtask_index = j.at("final_subtask_index").get<int>();
      t.plan_finished = j.at("plan_finished").get<bool>();
      if (j.at("steps").get<std::size_t>() != t.steps.size())
        throw std::runtime_error("trajectory: step count does not match the end record");
      have_end = true;
    } else {
      throw std::runtime_error("trajectory: unexpected record '" + kind + "'");
    }
  }
  if (!have_header || !have_end) throw std::runtime_error("trajectory: truncated file");
  return t;
}

Trajectory read_trajectory(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return read_trajectory(in);
}

std::string replay_mismatch(const Trajectory& t) {
  WorldState state = t.header.initial;
  std::string feedback = initial_feedback(state);
  bool done = false;
  for (const auto& s : t.steps) {
    const auto obs = render_observation(state, feedback);
    if (obs.text != s.raw.text)
      return "step " + std::to_string(s.t) + ": observation differs: '" + obs.text + "' vs '" + s.raw.text + "'";
    auto r = step(state, t.header.task, parse_command(s.action));
    if (r.done != s.done) return "step " + std::to_string(s.t) + ": done flag differs";
    state = std::move(r.state);
    feedback = std::move(r.feedback);
    done = done || s.done;
  }
  if (done != t.done) return "episode done flag differs";
  return {};
}

}  // namespace pet::harness

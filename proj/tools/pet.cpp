#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "pet/action.hpp"
#include "pet/expert.hpp"
#include "pet/harness/config.hpp"
#include "pet/harness/evaluate.hpp"
#include "pet/harness/perturb.hpp"
#include "pet/lm/hash_embed.hpp"
#include "pet/lm/truth.hpp"
#include "pet/text.hpp"

namespace fs = std::filesystem;
using namespace pet;
using namespace pet::harness;

namespace {

struct Common {
  std::string config_path;
  std::vector<std::string> overrides;
  bool verbose = false;
};

RunConfig load_config(const Common& c) {
  RunConfig cfg = c.config_path.empty() ? RunConfig{} : RunConfig::load(c.config_path);
  for (const auto& kv : c.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("--set expects key=value, got '" + kv + "'");
    cfg.set(trim(kv.substr(0, eq)), trim(kv.substr(eq + 1)));
  }
  return cfg;
}

void emit_config(const RunConfig& cfg, const std::string& out_dir) {
  if (out_dir.empty()) {
    spdlog::info("config {}\n{}", cfg.hash(), cfg.dump());
    return;
  }
  fs::create_directories(out_dir);
  std::ofstream(fs::path(out_dir) / "config.ini") << cfg.dump();
  spdlog::info("config {} written to {}", cfg.hash(), (fs::path(out_dir) / "config.ini").string());
}

void add_common(CLI::App* app, Common& c) {
  app->add_option("-c,--config", c.config_path, "Run configuration file")->check(CLI::ExistingFile);
  app->add_option("--set", c.overrides, "Override a setting, e.g. --set eval.workers=4");
  app->add_flag("-v,--verbose", c.verbose, "Debug logging");
}

Splits splits_for(const RunConfig& cfg, const std::string& scenes_dir) {
  if (scenes_dir.empty()) return build_splits(cfg.scene, cfg.splits);
  Splits s;
  s.train = read_scenes(fs::path(scenes_dir) / "train.jsonl");
  s.seen = read_scenes(fs::path(scenes_dir) / "seen.jsonl");
  s.unseen = read_scenes(fs::path(scenes_dir) / "unseen.jsonl");
  return s;
}

const std::vector<Scene>& split_named(const Splits& s, const std::string& name) {
  if (name == "train") return s.train;
  if (name == "seen") return s.seen;
  if (name == "unseen") return s.unseen;
  throw std::invalid_argument("unknown split '" + name + "' (train, seen, unseen)");
}

std::string checkpoint_name(const std::string& row, int seed) { return fmt::format("{}-seed{}.ckpt", row, seed); }

void print_demo(const Demonstration& demo) {
  std::cout << "Task: " << demo.task.goal_text << "\n";
  std::cout << "Plan: " << join(demo.subtask_plan, ", ") << "\n\n";
  WorldState state = demo.initial;
  std::string feedback = initial_feedback(state);
  std::cout << render_observation(state, feedback).text << "\n";
  for (const auto& st : demo.steps) {
    auto r = step(state, demo.task, st.action);
    std::cout << "> " << st.action.text() << "\n" << r.feedback << "\n";
    state = std::move(r.state);
  }
  std::cout << (demo.solved ? "solved" : "not solved") << " in " << demo.steps.size() << " steps\n";
}

Scene pick_scene(const RunConfig& cfg, std::uint64_t seed, int variant, const std::string& scenes_file, int index) {
  if (!scenes_file.empty()) {
    auto all = read_scenes(scenes_file);
    if (index < 0 || index >= static_cast<int>(all.size())) throw std::out_of_range("scene index out of range");
    return all[static_cast<std::size_t>(index)];
  }
  return generate_scene(seed, cfg.scene, variant);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Plan, Eliminate and Track on a household text environment"};
  app.require_subcommand(1);
  Common common;

  // gen-scenes
  auto* gen = app.add_subcommand("gen-scenes", "Generate the train/seen/unseen scene splits");
  add_common(gen, common);
  std::string out_dir = "scenes";
  gen->add_option("-o,--out", out_dir, "Output directory");

  // demo
  auto* demo = app.add_subcommand("demo", "Print an expert demonstration");
  add_common(demo, common);
  std::uint64_t scene_seed = 0;
  int variant = 0, scene_index = -1;
  std::string scenes_file, trajectory_out;
  bool demo_pet = false;
  demo->add_option("--seed", scene_seed, "Scene seed");
  demo->add_option("--variant", variant, "Task variant within the room");
  demo->add_option("--scenes", scenes_file, "Read the scene from a scene file")->check(CLI::ExistingFile);
  demo->add_option("--index", scene_index, "Line index within --scenes");
  demo->add_option("--trajectory", trajectory_out, "Also write the expert's episode as a trajectory file");
  demo->add_flag("--pet", demo_pet, "Run plan, eliminate and track alongside the expert in the trajectory");

  // train
  auto* train = app.add_subcommand("train", "Behaviour cloning for one configuration row");
  add_common(train, common);
  std::string row_name = "pet", ckpt_out, scenes_dir;
  int run_seed = 0;
  train->add_option("--row", row_name, "base | eliminate | plan_track | pet");
  train->add_option("--seed", run_seed, "Training seed index");
  train->add_option("-o,--out", ckpt_out, "Checkpoint path")->required();
  train->add_option("--scenes", scenes_dir, "Directory from gen-scenes");

  // eval
  auto* eval = app.add_subcommand("eval", "Completion rates per configuration row and split");
  add_common(eval, common);
  std::vector<std::string> rows{"base", "eliminate", "plan_track", "pet"}, splits{"seen", "unseen"};
  std::string ckpt_dir, eval_out, from_dir;
  double perturb_rate = 0;
  bool random_agent_flag = false;
  eval->add_option("--rows", rows, "Configuration rows");
  eval->add_option("--splits", splits, "Evaluation splits");
  eval->add_option("--checkpoints", ckpt_dir, "Directory of {row}-seed{n}.ckpt; trains in-process when absent");
  eval->add_option("--scenes", scenes_dir, "Directory from gen-scenes");
  eval->add_option("-o,--out", eval_out, "Write trajectories, checkpoints and report.json here");
  eval->add_option("--perturb", perturb_rate, "Fraction of goals to perturb")->check(CLI::Range(0.0, 1.0));
  eval->add_option("--from", from_dir, "Rebuild the report from stored trajectories only")->check(CLI::ExistingDirectory);
  eval->add_flag("--random-agent", random_agent_flag, "Play uniformly random actions instead of a policy");

  // eval-plan
  auto* eplan = app.add_subcommand("eval-plan", "Plan accuracy and similarity");
  add_common(eplan, common);
  std::string split_name = "train";
  eplan->add_option("--split", split_name, "Split whose goals are planned");
  eplan->add_option("--perturb", perturb_rate, "Fraction of goals to perturb")->check(CLI::Range(0.0, 1.0));

  // eval-eliminate
  auto* elim = app.add_subcommand("eval-eliminate", "Relevance AUC and masking rate over expert demos");
  add_common(elim, common);
  bool random_scores = false, goal_conditioning = false;
  elim->add_option("--split", split_name, "Split");
  elim->add_flag("--random", random_scores, "Uniform random relevance scores");
  elim->add_flag("--goal", goal_conditioning, "Condition on the goal instead of the active sub-task");

  // eval-track
  auto* etrack = app.add_subcommand("eval-track", "Tracker precision and recall on demos and truncated demos");
  add_common(etrack, common);
  int n_demos = 100;
  etrack->add_option("--split", split_name, "Split");
  etrack->add_option("-n,--demos", n_demos, "Number of demos");

  // play
  auto* play = app.add_subcommand("play", "Interactive episode");
  add_common(play, common);
  PipelineFlags play_flags;
  play->add_option("--seed", scene_seed, "Scene seed");
  play->add_option("--variant", variant, "Task variant");
  play->add_flag("--plan", play_flags.plan, "Generate a sub-task plan");
  play->add_flag("--eliminate", play_flags.eliminate, "Mask irrelevant entities");
  play->add_flag("--track", play_flags.track, "Track sub-task progress");

  CLI11_PARSE(app, argc, argv);
  spdlog::set_default_logger(spdlog::stderr_color_mt("pet"));
  spdlog::set_level(common.verbose ? spdlog::level::debug : spdlog::level::info);
  spdlog::set_pattern("[%l] %v");

  try {
    const RunConfig cfg = load_config(common);
    const auto factory = make_backend_factory(cfg.lm);

    if (gen->parsed()) {
      emit_config(cfg, out_dir);
      const auto s = build_splits(cfg.scene, cfg.splits);
      write_scenes(fs::path(out_dir) / "train.jsonl", s.train);
      write_scenes(fs::path(out_dir) / "seen.jsonl", s.seen);
      write_scenes(fs::path(out_dir) / "unseen.jsonl", s.unseen);
      std::cout << fmt::format("train {} seen {} unseen {}\n", s.train.size(), s.seen.size(), s.unseen.size());
    } else if (demo->parsed()) {
      emit_config(cfg, "");
      const Scene scene = pick_scene(cfg, scene_seed, variant, scenes_file, scene_index);
      const auto d = solve(scene.state, scene.task, Catalog::builtin(), {cfg.scene.expert_budget});
      print_demo(d);
      if (!trajectory_out.empty()) {
        auto truth = std::make_shared<lm::EpisodeTruth>(lm::EpisodeTruth::from_scene(scene.state, scene.task));
        auto bridge = factory(truth, scene.seed);
        EpisodeOptions opt;
        opt.step_budget = cfg.scene.expert_budget;
        opt.eliminate = cfg.eliminate;
        ExampleBank bank;
        if (demo_pet) {
          opt.flags = {true, true, true};
          bank = build_bank(build_splits(cfg.scene, cfg.splits).train, *bridge);
          opt.bank = &bank;
          opt.plan_k = static_cast<std::size_t>(cfg.eval.plan_k);
        }
        std::vector<Action> script;
        for (const auto& st : d.steps) script.push_back(st.action);
        auto traj = run_episode(scene, *bridge, truth.get(), scripted_agent(script), opt);
        traj.header.row = demo_pet ? "expert+pet" : "expert";
        traj.header.split = "demo";
        traj.header.config_hash = cfg.hash();
        write_trajectory(trajectory_out, traj);
      }
    } else if (train->parsed()) {
      emit_config(cfg, "");
      const auto s = splits_for(cfg, scenes_dir);
      const auto& row = row_by_name(row_name);
      auto trained = train_row(s.train, row, run_seed, cfg, factory, [](int e, double loss, double acc) {
        spdlog::info("epoch {:3d} loss {:.4f} accuracy {:.4f}", e, loss, acc);
      });
      trained.result.params.save(ckpt_out);
      spdlog::info("saved {}", ckpt_out);
    } else if (eval->parsed()) {
      std::vector<Trajectory> trajs;
      if (!from_dir.empty()) {
        for (const auto& e : fs::recursive_directory_iterator(from_dir))
          if (e.is_regular_file() && e.path().extension() == ".jsonl") trajs.push_back(read_trajectory(e.path()));
        std::sort(trajs.begin(), trajs.end(), [](const Trajectory& a, const Trajectory& b) {
          return std::tie(a.header.row, a.header.split, a.header.run_seed, a.header.scene_seed, a.header.variant) <
                 std::tie(b.header.row, b.header.split, b.header.run_seed, b.header.scene_seed, b.header.variant);
        });
        const std::string hash = trajs.empty() ? cfg.hash() : trajs.front().header.config_hash;
        std::cout << report_from_trajectories(trajs, hash, cfg.lm.embed_dim).table();
        return 0;
      }
      emit_config(cfg, eval_out);
      const auto s = splits_for(cfg, scenes_dir);
      auto embedder = factory(nullptr, 0);
      const ExampleBank bank = build_bank(s.train, *embedder);
      for (const auto& name : rows) {
        const auto& row = row_by_name(name);
        for (int seed = 0; seed < cfg.eval.seeds; ++seed) {
          std::optional<agent::PolicyParams> params;
          if (!random_agent_flag) {
            if (!ckpt_dir.empty()) {
              const auto path = fs::path(ckpt_dir) / checkpoint_name(name, seed);
              if (!fs::exists(path))
                throw std::runtime_error("missing checkpoint for row '" + name + "': " + path.string());
              params = agent::PolicyParams::load(path);
            } else {
              spdlog::info("training {} seed {}", name, seed);
              params = train_row(s.train, row, seed, cfg, factory).result.params;
              if (!eval_out.empty()) {
                fs::create_directories(fs::path(eval_out) / "checkpoints");
                params->save(fs::path(eval_out) / "checkpoints" / checkpoint_name(name, seed));
              }
            }
          }
          for (const auto& split : splits) {
            SplitRun run{split, name, seed, params ? &*params : nullptr, row.flags, &bank, perturb_rate};
            auto out = run_split(split_named(s, split), run, cfg, factory);
            if (!eval_out.empty()) {
              const auto dir = fs::path(eval_out) / "trajectories" / name / split;
              fs::create_directories(dir);
              for (const auto& t : out)
                write_trajectory(dir / fmt::format("s{}-{}-{}.jsonl", seed, t.header.scene_seed, t.header.variant), t);
            }
            std::move(out.begin(), out.end(), std::back_inserter(trajs));
          }
        }
      }
      const auto rep = report_from_trajectories(trajs, cfg.hash(), cfg.lm.embed_dim);
      std::cout << rep.table();
      if (!eval_out.empty()) std::ofstream(fs::path(eval_out) / "report.json") << rep.to_json().dump(2) << "\n";
    } else if (eplan->parsed()) {
      emit_config(cfg, "");
      const auto s = build_splits(cfg.scene, cfg.splits);
      auto embedder = factory(nullptr, 0);
      const ExampleBank bank = build_bank(s.train, *embedder);
      std::vector<std::vector<std::string>> gen_plans, gt;
      for (const auto& scene : split_named(s, split_name)) {
        auto truth = std::make_shared<lm::EpisodeTruth>(lm::EpisodeTruth::from_scene(scene.state, scene.task));
        auto bridge = factory(truth, scene.seed);
        std::string goal = scene.task.goal_text;
        Rng coin(mix_seed(scene.seed, 0x9e27 + static_cast<std::uint64_t>(scene.variant)));
        if (coin.uniform() < perturb_rate) goal = perturb_goal(goal, scene.seed);
        gen_plans.push_back(generate_plan(*bridge, bank, goal, static_cast<std::size_t>(cfg.eval.plan_k)).subtasks);
        gt.push_back(ground_truth_plan(scene.task));
      }
      const auto m = evaluate_plans(gen_plans, gt, *embedder);
      std::cout << fmt::format("plans {} accuracy {:.4f} similarity {:.4f}\n", gt.size(), m.exact_accuracy, m.similarity);
    } else if (elim->parsed()) {
      emit_config(cfg, "");
      const auto s = build_splits(cfg.scene, cfg.splits);
      const auto f = random_scores ? random_scorer_factory(factory, cfg.lm.rng_seed) : factory;
      const auto st = eliminate_study(split_named(s, split_name), f, cfg.eliminate, !goal_conditioning);
      auto show = [](const std::optional<double>& v) { return v ? fmt::format("{:.4f}", *v) : std::string("-"); };
      for (const auto& [type, a] : st.auc)
        std::cout << fmt::format("{:<20} receptacles {} objects {}\n", type, show(a.receptacles), show(a.objects));
      std::cout << fmt::format("{:<20} receptacles {} objects {}\n", "pooled", show(st.pooled.receptacles),
                               show(st.pooled.objects));
      std::cout << fmt::format("masked away {:.1f}% of listed entities over {} observations\n",
                               100 * st.removed_fraction, st.observations);
    } else if (etrack->parsed()) {
      emit_config(cfg, "");
      const auto s = build_splits(cfg.scene, cfg.splits);
      std::vector<Demonstration> demos;
      for (const auto& scene : split_named(s, split_name)) {
        if (static_cast<int>(demos.size()) >= n_demos) break;
        demos.push_back(solve(scene.state, scene.task));
      }
      const auto m = evaluate_tracker(demos, factory);
      std::cout << fmt::format("precision {:.4f} recall {:.4f} (tp {} fp {} fn {} tn {})\n", m.precision, m.recall,
                               m.tp, m.fp, m.fn, m.tn);
    } else if (play->parsed()) {
      emit_config(cfg, "");
      const Scene scene = generate_scene(scene_seed, cfg.scene, variant);
      auto truth = std::make_shared<lm::EpisodeTruth>(lm::EpisodeTruth::from_scene(scene.state, scene.task));
      auto bridge = factory(truth, scene.seed);
      EpisodeOptions opt;
      opt.flags = play_flags;
      opt.eliminate = cfg.eliminate;
      opt.step_budget = cfg.eval.step_budget;
      ExampleBank bank;
      if (play_flags.plan) {
        bank = build_bank(build_splits(cfg.scene, cfg.splits).train, *bridge);
        opt.bank = &bank;
      }
      std::cout << "Your task is to: " << scene.task.goal_text << "\n";
      const auto plan = pipeline_plan(scene, scene.task.goal_text, *bridge, opt);
      if (!plan.empty()) std::cout << "Plan: " << join(plan, ", ") << "\n";
      std::cout << "Type a command, 'help' for the permissible ones, 'quit' to stop.\n";
      const AgentFn human = [&](const AgentView& v) -> int {
        if (opt.flags.track) std::cout << "[now: " << v.conditioning << "]\n";
        std::cout << v.observation.text << "\n";
        for (;;) {
          std::cout << "> " << std::flush;
          std::string line;
          if (!std::getline(std::cin, line) || trim(line) == "quit") throw std::runtime_error("quit");
          if (trim(line) == "help") {
            for (const auto& a : v.actions) std::cout << "  " << a << "\n";
            continue;
          }
          try {
            const auto text = parse_command(line).text();
            for (std::size_t i = 0; i < v.actions.size(); ++i)
              if (v.actions[i] == text) return static_cast<int>(i);
            std::cout << kNothingHappens << "\n";
          } catch (const ParseError& e) {
            std::cout << "Unrecognised command (" << e.what() << ")\n";
          }
        }
      };
      try {
        const auto t = run_episode(scene, *bridge, truth.get(), human, opt);
        std::cout << (t.done ? "Task complete" : "Out of steps") << " after " << t.steps.size() << " steps.\n";
      } catch (const std::runtime_error& e) {
        if (std::string(e.what()) != "quit") throw;
      }
    }
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 0;
}

#include "pet/harness/evaluate.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <fmt/format.h>

#include "pet/expert.hpp"
#include "pet/harness/dataset.hpp"
#include "pet/harness/perturb.hpp"
#include "pet/lm/hash_embed.hpp"
#include "pet/lm/truth.hpp"
#include "pet/rng.hpp"
#include "pet/text.hpp"

namespace pet::harness {

const std::vector<AblationRow>& ablation_rows() {
  static const std::vector<AblationRow> rows{
      {"base", {false, false, false}},
      {"eliminate", {false, true, false}},
      {"plan_track", {true, false, true}},
      {"pet", {true, true, true}},
  };
  return rows;
}

const AblationRow& row_by_name(const std::string& name) {
  for (const auto& r : ablation_rows())
    if (r.name == name) return r;
  throw std::invalid_argument("unknown configuration row '" + name + "' (base, eliminate, plan_track, pet)");
}

void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
  const std::size_t w = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(workers, 1)), 1, std::max<std::size_t>(n, 1));
  if (w == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (std::size_t k = 0; k < w; ++k)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next++) < n;) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(mu);
          if (!error) error = std::current_exception();
          next = n;
        }
      }
    });
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

ExampleBank build_bank(const std::vector<Scene>& train, lm::Backend& embedder) {
  ExampleBank bank;
  for (const auto& s : train) bank.add(s.task.goal_text, ground_truth_plan(s.task), embedder);
  return bank;
}

TrainedRow train_row(const std::vector<Scene>& train, const AblationRow& row, int seed, const RunConfig& config,
                     const BackendFactory& factory, const agent::EpochCallback& on_epoch) {
  auto samples = build_samples(train, row.flags, factory, config.eliminate);
  agent::PolicyConfig pc = config.policy;
  pc.init_seed = mix_seed(config.policy.init_seed, static_cast<std::uint64_t>(seed));
  agent::TrainConfig tc = config.train;
  tc.shuffle_seed = mix_seed(config.train.shuffle_seed, static_cast<std::uint64_t>(seed));
  TrainedRow out;
  out.row = row.name;
  out.seed = seed;
  out.result = agent::train_bc(samples, agent::PolicyParams::init(pc), tc, on_epoch);
  return out;
}

std::vector<Trajectory> run_split(const std::vector<Scene>& scenes, const SplitRun& run, const RunConfig& config,
                                  const BackendFactory& factory) {
  if (scenes.empty()) throw std::invalid_argument("split '" + run.split + "' is empty");
  std::vector<Trajectory> out(scenes.size());
  parallel_for(scenes.size(), config.eval.workers, [&](std::size_t i) {
    const auto& scene = scenes[i];
    const std::uint64_t episode =
        mix_seed(mix_seed(fnv1a(run.row + "/" + run.split), static_cast<std::uint64_t>(run.seed)),
                 mix_seed(scene.seed, static_cast<std::uint64_t>(scene.variant)));
    auto truth = std::make_shared<lm::EpisodeTruth>(lm::EpisodeTruth::from_scene(scene.state, scene.task));
    auto bridge = factory(truth, episode);

    EpisodeOptions opt;
    opt.flags = run.flags;
    opt.step_budget = config.eval.step_budget;
    opt.eliminate = config.eliminate;
    opt.plan_k = static_cast<std::size_t>(config.eval.plan_k);
    opt.bank = run.bank;
    if (run.perturb_rate > 0) {
      Rng coin(mix_seed(episode, 0x9e27));
      if (coin.uniform() < run.perturb_rate)
        opt.goal_text = perturb_goal(scene.task.goal_text, mix_seed(scene.seed, static_cast<std::uint64_t>(scene.variant)));
    }
    const AgentFn agent = run.params ? policy_agent(*run.params, *bridge) : random_agent(episode);
    auto traj = run_episode(scene, *bridge, truth.get(), agent, opt);
    traj.header.row = run.row;
    traj.header.split = run.split;
    traj.header.run_seed = run.seed;
    traj.header.config_hash = config.hash();
    out[i] = std::move(traj);
  });
  return out;
}

const CompletionCell* EvalReport::cell(const std::string& row, const std::string& split) const {
  for (const auto& c : completion)
    if (c.row == row && c.split == split) return &c;
  return nullptr;
}

namespace {

struct ScoreBag {
  std::vector<double> scores;
  std::vector<int> labels;
};

std::optional<double> auc_or_none(const ScoreBag& b) {
  try {
    return evaluate_auc(b.scores, b.labels);
  } catch (const std::domain_error&) {
    return std::nullopt;
  }
}

nlohmann::json opt_json(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); }

}  // namespace

EvalReport report_from_trajectories(const std::vector<Trajectory>& trajectories, const std::string& config_hash,
                                    int embed_dim) {
  EvalReport rep;
  rep.config_hash = config_hash;

  struct Acc {
    std::map<int, std::pair<int, int>> seeds;  // seed -> (done, total)
    double steps = 0, success_steps = 0;
    int episodes = 0, successes = 0;
  };
  std::map<std::pair<std::string, std::string>, Acc> acc;
  std::map<std::string, std::pair<std::vector<std::vector<std::string>>, std::vector<std::vector<std::string>>>> plans;
  std::map<std::string, std::pair<ScoreBag, ScoreBag>> bags;
  TrackerMetrics tm;
  bool any_track = false;

  for (const auto& t : trajectories) {
    const auto& h = t.header;
    auto& a = acc[{h.row, h.split}];
    auto& seed = a.seeds[h.run_seed];
    seed.first += t.done ? 1 : 0;
    seed.second += 1;
    a.episodes += 1;
    a.steps += static_cast<double>(t.steps.size());
    if (t.done) {
      a.successes += 1;
      a.success_steps += static_cast<double>(t.steps.size());
    }
    if (h.flags.plan) {
      plans[h.row].first.push_back(h.plan);
      plans[h.row].second.push_back(ground_truth_plan(h.task));
    }
    if (h.flags.eliminate) {
      auto& [rb, ob] = bags[std::string(to_string(h.task.type))];
      const std::set<std::string> rel(h.relevant.begin(), h.relevant.end());
      for (const auto& s : t.steps)
        for (const auto& d : s.decisions) {
          auto& bag = d.kind == EntityKind::receptacle ? rb : ob;
          bag.scores.push_back(d.score);
          bag.labels.push_back(rel.count(d.entity) ? 1 : 0);
        }
    }
    if (h.flags.track) {
      any_track = true;
      if (t.plan_finished && t.done) ++tm.tp;
      else if (t.plan_finished) ++tm.fp;
      else if (t.done) ++tm.fn;
      else ++tm.tn;
    }
  }

  for (const auto& [key, a] : acc) {
    CompletionCell c;
    c.row = key.first;
    c.split = key.second;
    double sum = 0;
    for (const auto& [seed, dt] : a.seeds) {
      c.per_seed[seed] = static_cast<double>(dt.first) / dt.second;
      sum += c.per_seed[seed];
    }
    c.mean = sum / static_cast<double>(a.seeds.size());
    c.episodes = a.episodes;
    c.mean_steps = a.steps / a.episodes;
    c.mean_success_steps = a.successes ? a.success_steps / a.successes : 0;
    rep.completion.push_back(std::move(c));
  }

  struct HashEmbedder : lm::Backend {
    int dim;
    explicit HashEmbedder(int d) : dim(d) {}
    std::string generate(const std::string&, int, const std::vector<std::string>&) override { return ""; }
    double score_choice(const std::string&, const std::string&) override { return 0.5; }
    lm::YesNo yes_no(const std::string&) override { return {}; }
    lm::Vec embed(const std::string& text) override { return lm::lexical_embed(text, dim); }
  } embedder(embed_dim);
  for (const auto& [row, pg] : plans) {
    const auto m = evaluate_plans(pg.first, pg.second, embedder);
    rep.plan_accuracy[row] = m.exact_accuracy;
    rep.plan_similarity[row] = m.similarity;
  }
  for (const auto& [type, b] : bags) rep.eliminate_auc[type] = AucCell{auc_or_none(b.first), auc_or_none(b.second)};
  if (any_track) {
    tm.precision = tm.tp + tm.fp ? static_cast<double>(tm.tp) / (tm.tp + tm.fp) : 1.0;
    tm.recall = tm.tp + tm.fn ? static_cast<double>(tm.tp) / (tm.tp + tm.fn) : 1.0;
    rep.track = tm;
  }
  return rep;
}

nlohmann::json EvalReport::to_json() const {
  nlohmann::json j;
  j["config_hash"] = config_hash;
  j["completion"] = nlohmann::json::array();
  for (const auto& c : completion) {
    nlohmann::json seeds = nlohmann::json::object();
    for (const auto& [s, r] : c.per_seed) seeds[std::to_string(s)] = r;
    j["completion"].push_back({{"row", c.row},
                               {"split", c.split},
                               {"mean", c.mean},
                               {"per_seed", seeds},
                               {"episodes", c.episodes},
                               {"mean_steps", c.mean_steps},
                               {"mean_success_steps", c.mean_success_steps}});
  }
  j["plan_accuracy"] = plan_accuracy;
  j["plan_similarity"] = plan_similarity;
  j["eliminate_auc"] = nlohmann::json::object();
  for (const auto& [type, a] : eliminate_auc)
    j["eliminate_auc"][type] = {{"receptacles", opt_json(a.receptacles)}, {"objects", opt_json(a.objects)}};
  if (track)
    j["track"] = {{"precision", track->precision}, {"recall", track->recall}, {"tp", track->tp},
                  {"fp", track->fp},               {"fn", track->fn},         {"tn", track->tn}};
  return j;
}

std::string EvalReport::table() const {
  std::ostringstream out;
  out << fmt::format("{:<12} {:<8} {:>8} {:>8} {:>6}  per seed\n", "row", "split", "rate", "steps", "n");
  for (const auto& c : completion) {
    std::string seeds;
    for (const auto& [s, r] : c.per_seed) seeds += fmt::format(" {}:{:.3f}", s, r);
    out << fmt::format("{:<12} {:<8} {:>8.3f} {:>8.2f} {:>6} {}\n", c.row, c.split, c.mean, c.mean_steps, c.episodes,
                       seeds);
  }
  for (const auto& [row, a] : plan_accuracy)
    out << fmt::format("plan {:<12} accuracy {:.4f} similarity {:.4f}\n", row, a, plan_similarity.at(row));
  for (const auto& [type, a] : eliminate_auc)
    out << fmt::format("auc {:<20} receptacles {} objects {}\n", type,
                       a.receptacles ? fmt::format("{:.4f}", *a.receptacles) : "-",
                       a.objects ? fmt::format("{:.4f}", *a.objects) : "-");
  if (track)
    out << fmt::format("track precision {:.4f} recall {:.4f} (tp {} fp {} fn {} tn {})\n", track->precision,
                       track->recall, track->tp, track->fp, track->fn, track->tn);
  return out.str();
}

namespace {

class RandomScorer : public lm::Backend {
 public:
  RandomScorer(std::shared_ptr<lm::Backend> inner, std::uint64_t seed) : inner_(std::move(inner)), rng_(seed) {}
  std::string generate(const std::string& p, int n, const std::vector<std::string>& stop) override {
    return inner_->generate(p, n, stop);
  }
  double score_choice(const std::string&, const std::string&) override {
    std::lock_guard lock(mu_);
    return rng_.uniform();
  }
  lm::YesNo yes_no(const std::string& p) override { return inner_->yes_no(p); }
  lm::Vec embed(const std::string& t) override { return inner_->embed(t); }

 private:
  std::shared_ptr<lm::Backend> inner_;
  std::mutex mu_;
  Rng rng_;
};

}  // namespace

BackendFactory random_scorer_factory(BackendFactory inner, std::uint64_t seed) {
  return [inner = std::move(inner), seed](std::shared_ptr<lm::EpisodeTruth> truth, std::uint64_t episode) {
    return std::make_shared<RandomScorer>(inner(std::move(truth), episode), mix_seed(seed, episode));
  };
}

EliminateStudy eliminate_study(const std::vector<Scene>& scenes, const BackendFactory& factory,
                               const EliminatorConfig& config, bool subtask_conditioning) {
  EliminateStudy out;
  std::map<std::string, std::pair<ScoreBag, ScoreBag>> bags;
  ScoreBag pooled_r, pooled_o;
  double removed = 0;
  for (const auto& scene : scenes) {
    auto truth = std::make_shared<lm::EpisodeTruth>(lm::EpisodeTruth::from_scene(scene.state, scene.task));
    auto bridge = factory(truth, mix_seed(scene.seed, 0xe11 + static_cast<std::uint64_t>(scene.variant)));
    const auto& demo = truth->demo;
    const auto structured = decompose(scene.task);
    const auto task_rel = truth->relevant_for_task();
    auto& [rb, ob] = bags[std::string(to_string(scene.task.type))];
    WorldState state = demo.initial;
    for (const auto& st : demo.steps) {
      truth->state = state;
      const auto idx = static_cast<std::size_t>(st.subtask_index - 1);
      const std::string cond = subtask_conditioning ? demo.subtask_plan.at(idx) : scene.task.goal_text;
      const auto rel = subtask_conditioning ? truth->relevant_for_subtask(structured.at(idx)) : task_rel;
      const auto decisions = score_entities(*bridge, cond, st.observation, config);
      for (const auto& d : decisions) {
        const int label = rel.count(d.entity) ? 1 : 0;
        auto& bag = d.kind == EntityKind::receptacle ? rb : ob;
        auto& pool = d.kind == EntityKind::receptacle ? pooled_r : pooled_o;
        bag.scores.push_back(d.score);
        bag.labels.push_back(label);
        pool.scores.push_back(d.score);
        pool.labels.push_back(label);
      }
      if (!st.observation.listed.empty()) {
        const auto masked = mask_observation(st.observation, decisions);
        removed += 1.0 - static_cast<double>(masked.listed.size()) / static_cast<double>(st.observation.listed.size());
        ++out.observations;
      }
      state = step(state, scene.task, st.action).state;
    }
  }
  for (const auto& [type, b] : bags) out.auc[type] = AucCell{auc_or_none(b.first), auc_or_none(b.second)};
  out.pooled = AucCell{auc_or_none(pooled_r), auc_or_none(pooled_o)};
  out.removed_fraction = out.observations ? removed / out.observations : 0;
  return out;
}

}  // namespace pet::harness

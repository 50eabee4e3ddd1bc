#include "pet/harness/config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "pet/rng.hpp"
#include "pet/text.hpp"

namespace pet::harness {

namespace {

namespace pt = boost::property_tree;

// One binding per key: reads into and writes from the config struct.
struct Field {
  std::function<void(const std::string&)> set;
  std::function<std::string()> get;
};

template <class T>
Field bind(T& ref) {
  return {[&ref](const std::string& v) {
            std::istringstream in(v);
            T tmp{};
            if constexpr (std::is_same_v<T, bool>) {
              const std::string s = to_lower(trim(v));
              if (s == "true" || s == "1" || s == "yes" || s == "on") tmp = true;
              else if (s == "false" || s == "0" || s == "no" || s == "off") tmp = false;
              else throw std::invalid_argument("expected a boolean, got '" + v + "'");
            } else if constexpr (std::is_same_v<T, std::string>) {
              tmp = trim(v);
            } else {
              if (!(in >> tmp) || !(in >> std::ws).eof()) throw std::invalid_argument("bad value '" + v + "'");
            }
            ref = tmp;
          },
          [&ref]() {
            if constexpr (std::is_same_v<T, bool>) return std::string(ref ? "true" : "false");
            else return fmt::format("{}", ref);
          }};
}

std::map<std::string, std::map<std::string, Field>> fields(RunConfig& c) {
  return {
      {"scene",
       {{"min_receptacles", bind(c.scene.min_receptacles)},
        {"max_receptacles", bind(c.scene.max_receptacles)},
        {"max_objects_per_receptacle", bind(c.scene.max_objects_per_receptacle)},
        {"anomaly_rate", bind(c.scene.anomaly_rate)},
        {"max_attempts", bind(c.scene.max_attempts)},
        {"expert_budget", bind(c.scene.expert_budget)}}},
      {"splits",
       {{"train", bind(c.splits.train)},
        {"seen", bind(c.splits.seen)},
        {"unseen", bind(c.splits.unseen)},
        {"seed_base", bind(c.splits.seed_base)},
        {"unseen_offset", bind(c.splits.unseen_offset)},
        {"max_variants", bind(c.splits.max_variants)}}},
      {"lm",
       {{"backend", bind(c.lm.backend)},
        {"noise_epsilon", bind(c.lm.noise_epsilon)},
        {"rng_seed", bind(c.lm.rng_seed)},
        {"embed_dim", bind(c.lm.embed_dim)},
        {"endpoint", bind(c.lm.http.endpoint)},
        {"retries", bind(c.lm.http.retries)},
        {"timeout_ms", bind(c.lm.http.timeout_ms)},
        {"max_inflight", bind(c.lm.http.max_inflight)},
        {"backoff_ms", bind(c.lm.http.backoff_ms)},
        {"cache_path", bind(c.lm.cache_path)},
        {"cache_mode", bind(c.lm.cache_mode)}}},
      {"eliminate", {{"tau_o", bind(c.eliminate.tau_o)}, {"tau_r", bind(c.eliminate.tau_r)}, {"guard", bind(c.eliminate.guard)}}},
      {"agent",
       {{"layers", bind(c.policy.layers)},
        {"heads", bind(c.policy.heads)},
        {"hidden", bind(c.policy.hidden)},
        {"embed_dim", bind(c.policy.embed_dim)},
        {"ffn", bind(c.policy.ffn)},
        {"init_seed", bind(c.policy.init_seed)}}},
      {"train",
       {{"epochs", bind(c.train.epochs)},
        {"lr", bind(c.train.lr)},
        {"momentum", bind(c.train.momentum)},
        {"batch_size", bind(c.train.batch_size)},
        {"grad_clip", bind(c.train.grad_clip)},
        {"shuffle_seed", bind(c.train.shuffle_seed)}}},
      {"eval",
       {{"step_budget", bind(c.eval.step_budget)},
        {"workers", bind(c.eval.workers)},
        {"seeds", bind(c.eval.seeds)},
        {"plan_k", bind(c.eval.plan_k)},
        {"perturb_rate", bind(c.eval.perturb_rate)}}},
  };
}

}  // namespace

RunConfig RunConfig::parse(const std::string& text) {
  RunConfig c;
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw std::invalid_argument("config: " + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  auto table = fields(c);
  for (const auto& [section, body] : tree) {
    auto sec = table.find(section);
    if (sec == table.end()) throw std::invalid_argument("config: unknown section [" + section + "]");
    for (const auto& [key, value] : body) {
      auto f = sec->second.find(key);
      if (f == sec->second.end()) throw std::invalid_argument("config: unknown key " + section + "." + key);
      try {
        f->second.set(value.data());
      } catch (const std::invalid_argument& e) {
        throw std::invalid_argument("config: " + section + "." + key + ": " + e.what());
      }
    }
  }
  c.validate();
  return c;
}

void RunConfig::set(const std::string& dotted_key, const std::string& value) {
  const auto dot = dotted_key.find('.');
  if (dot == std::string::npos) throw std::invalid_argument("config: expected section.key, got '" + dotted_key + "'");
  auto table = fields(*this);
  auto sec = table.find(dotted_key.substr(0, dot));
  if (sec == table.end()) throw std::invalid_argument("config: unknown section in '" + dotted_key + "'");
  auto f = sec->second.find(dotted_key.substr(dot + 1));
  if (f == sec->second.end()) throw std::invalid_argument("config: unknown key " + dotted_key);
  try {
    f->second.set(value);
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument("config: " + dotted_key + ": " + e.what());
  }
  validate();
}

void RunConfig::validate() const {
  scene.validate();
  policy.validate();
  if (lm.embed_dim != policy.embed_dim) throw std::invalid_argument("config: lm.embed_dim must equal agent.embed_dim");
  if (lm.backend != "oracle" && lm.backend != "http")
    throw std::invalid_argument("config: lm.backend must be oracle or http");
  if (lm.cache_mode != "record" && lm.cache_mode != "replay")
    throw std::invalid_argument("config: lm.cache_mode must be record or replay");
  if (eval.step_budget < 0 || eval.seeds < 1 || eval.plan_k < 1)
    throw std::invalid_argument("config: eval.step_budget >= 0, eval.seeds >= 1 and eval.plan_k >= 1 required");
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string RunConfig::dump() const {
  RunConfig copy = *this;
  std::string out;
  for (const auto& [section, keys] : fields(copy)) {
    out += "[" + section + "]\n";
    for (const auto& [key, f] : keys) out += key + " = " + f.get() + "\n";
    out += "\n";
  }
  return out;
}

std::string RunConfig::hash() const { return hex64(fnv1a(dump())); }

BackendFactory make_backend_factory(const LmConfig& lm) {
  if (lm.backend == "oracle") {
    return [lm](std::shared_ptr<lm::EpisodeTruth> truth, std::uint64_t episode) -> std::shared_ptr<lm::Backend> {
      lm::OracleConfig oc;
      oc.noise_epsilon = lm.noise_epsilon;
      oc.rng_seed = mix_seed(lm.rng_seed, episode);
      oc.embed_dim = lm.embed_dim;
      return std::make_shared<lm::OracleBackend>(oc, std::move(truth));
    };
  }
  std::shared_ptr<lm::Backend> shared;
  if (lm.cache_mode == "replay" && !lm.cache_path.empty()) {
    shared = std::make_shared<lm::CacheBackend>(nullptr, lm.cache_path, lm::CacheMode::replay);
  } else {
    shared = std::make_shared<lm::HttpBackend>(lm.http.with_env());
    if (!lm.cache_path.empty()) shared = std::make_shared<lm::CacheBackend>(shared, lm.cache_path, lm::CacheMode::record);
  }
  return [shared](std::shared_ptr<lm::EpisodeTruth>, std::uint64_t) { return shared; };
}

}  // namespace pet::harness

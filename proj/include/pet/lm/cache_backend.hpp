#pragma once

#include <filesystem>
#include <fstream>
#include <memory>
#include <shared_mutex>
#include <stdexcept>
#include <unordered_map>

#include "json.hpp"

#include "pet/lm/bridge.hpp"

namespace pet::lm {

enum class CacheMode {
  record,  // serve hits, forward misses to the inner backend and store them
  replay,  // serve hits, fail on misses
};

class CacheMiss : public std::runtime_error {
 public:
  explicit CacheMiss(const std::string& key)
      : std::runtime_error("cache miss in replay mode for key " + key), key_(key) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

// Record/replay wrapper. The store is an append-only file of JSON lines
// {key, capability, request, response}.
class CacheBackend : public Backend {
 public:
  CacheBackend(std::shared_ptr<Backend> inner, std::filesystem::path store, CacheMode mode = CacheMode::record);

  std::string generate(const std::string& prompt, int max_tokens, const std::vector<std::string>& stop) override;
  double score_choice(const std::string& prompt, const std::string& candidate) override;
  YesNo yes_no(const std::string& prompt) override;
  Vec embed(const std::string& text) override;

  static std::string make_key(const std::string& capability, const nlohmann::json& request);
  std::size_t size() const;

 private:
  template <class Fn>
  nlohmann::json lookup(const std::string& capability, const nlohmann::json& request, Fn&& call);

  std::shared_ptr<Backend> inner_;
  std::filesystem::path store_;
  CacheMode mode_;
  mutable std::shared_mutex mu_;
  std::unordered_map<std::string, nlohmann::json> entries_;
  std::ofstream out_;
};

}  // namespace pet::lm

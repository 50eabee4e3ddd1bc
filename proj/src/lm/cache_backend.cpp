#include "pet/lm/cache_backend.hpp"

#include <mutex>

#include "pet/rng.hpp"
#include "pet/text.hpp"

namespace pet::lm {

using nlohmann::json;

CacheBackend::CacheBackend(std::shared_ptr<Backend> inner, std::filesystem::path store, CacheMode mode)
    : inner_(std::move(inner)), store_(std::move(store)), mode_(mode) {
  if (mode_ == CacheMode::record && !inner_) throw std::invalid_argument("record mode needs an inner backend");
  if (std::ifstream in{store_}) {
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      try {
        auto j = json::parse(line);
        entries_[j.at("key").get<std::string>()] = j.at("response");
      } catch (const json::exception& e) {
        throw ProtocolError(store_.string() + ":" + std::to_string(lineno) + ": bad cache record: " + e.what());
      }
    }
  }
  if (mode_ == CacheMode::record) {
    out_.open(store_, std::ios::app);
    if (!out_) throw std::runtime_error("cannot open cache store " + store_.string());
  }
}

std::string CacheBackend::make_key(const std::string& capability, const json& request) {
  return hex64(fnv1a(capability + "\n" + request.dump()));
}

std::size_t CacheBackend::size() const {
  std::shared_lock lock(mu_);
  return entries_.size();
}

template <class Fn>
json CacheBackend::lookup(const std::string& capability, const json& request, Fn&& call) {
  const std::string key = make_key(capability, request);
  {
    std::shared_lock lock(mu_);
    if (auto it = entries_.find(key); it != entries_.end()) return it->second;
  }
  if (mode_ == CacheMode::replay) throw CacheMiss(key);
  json response = call();
  std::unique_lock lock(mu_);
  if (auto it = entries_.find(key); it != entries_.end()) return it->second;
  entries_[key] = response;
  out_ << json{{"key", key}, {"capability", capability}, {"request", request}, {"response", response}}.dump() << '\n';
  out_.flush();
  return response;
}

std::string CacheBackend::generate(const std::string& prompt, int max_tokens, const std::vector<std::string>& stop) {
  const json req{{"prompt", prompt}, {"max_tokens", max_tokens}, {"stop", stop}};
  return lookup("generate", req, [&] { return json{{"text", inner_->generate(prompt, max_tokens, stop)}}; })
      .at("text")
      .get<std::string>();
}

double CacheBackend::score_choice(const std::string& prompt, const std::string& candidate) {
  const json req{{"prompt", prompt}, {"candidate", candidate}};
  return lookup("score_choice", req, [&] { return json{{"score", inner_->score_choice(prompt, candidate)}}; })
      .at("score")
      .get<double>();
}

YesNo CacheBackend::yes_no(const std::string& prompt) {
  const json req{{"prompt", prompt}};
  const auto r = lookup("yes_no", req, [&] {
    const auto yn = inner_->yes_no(prompt);
    return json{{"p_yes", yn.p_yes}, {"p_no", yn.p_no}};
  });
  return {r.at("p_yes").get<double>(), r.at("p_no").get<double>()};
}

Vec CacheBackend::embed(const std::string& text) {
  const json req{{"text", text}};
  return lookup("embed", req, [&] { return json{{"vector", inner_->embed(text)}}; }).at("vector").get<Vec>();
}

}  // namespace pet::lm

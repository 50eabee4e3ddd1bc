#include "pet/lm/http_backend.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <thread>

#include <spdlog/spdlog.h>

#include "httplib.h"

namespace pet::lm {

struct HttpBackend::Counters {
  std::atomic<long> attempts{0};
};

HttpConfig HttpConfig::with_env() const {
  HttpConfig c = *this;
  if (c.endpoint.empty())
    if (const char* e = std::getenv("PET_LM_ENDPOINT")) c.endpoint = e;
  if (c.token.empty())
    if (const char* t = std::getenv("PET_LM_TOKEN")) c.token = t;
  return c;
}

HttpBackend::HttpBackend(HttpConfig config)
    : config_(std::move(config)),
      inflight_(std::clamp(config_.max_inflight, 1, 1024)),
      counters_(std::make_unique<Counters>()) {
  if (config_.endpoint.empty()) throw BackendError("no LM endpoint configured (set PET_LM_ENDPOINT)");
  if (config_.retries < 0) throw std::invalid_argument("retries must be non-negative");
  const auto scheme = config_.endpoint.find("://");
  if (scheme == std::string::npos) throw BackendError("endpoint lacks a scheme: " + config_.endpoint);
  const auto slash = config_.endpoint.find('/', scheme + 3);
  host_ = config_.endpoint.substr(0, slash);
  prefix_ = slash == std::string::npos ? "" : config_.endpoint.substr(slash);
  while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
}

HttpBackend::~HttpBackend() = default;

long HttpBackend::attempts() const { return counters_->attempts.load(); }

nlohmann::json HttpBackend::post(const std::string& route, const nlohmann::json& body) {
  inflight_.acquire();
  struct Release {
    std::counting_semaphore<1024>& s;
    ~Release() { s.release(); }
  } release{inflight_};

  const std::string path = prefix_ + route;
  const std::string payload = body.dump();
  int status = 0;
  std::string last_error;
  int backoff = config_.backoff_ms;
  for (int attempt = 0; attempt <= config_.retries; ++attempt) {
    if (attempt > 0 && backoff > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(backoff));
      backoff *= 2;
    }
    httplib::Client cli(host_);
    const auto sec = config_.timeout_ms / 1000;
    const auto usec = (config_.timeout_ms % 1000) * 1000;
    cli.set_connection_timeout(sec, usec);
    cli.set_read_timeout(sec, usec);
    cli.set_write_timeout(sec, usec);
    if (!config_.token.empty()) cli.set_bearer_token_auth(config_.token);
    ++counters_->attempts;
    auto res = cli.Post(path, payload, "application/json");
    if (!res) {
      status = 0;
      last_error = httplib::to_string(res.error());
      spdlog::warn("lm http {}: {} (attempt {}/{})", path, last_error, attempt + 1, config_.retries + 1);
      continue;
    }
    status = res->status;
    if (status >= 500) {
      last_error = "server error";
      spdlog::warn("lm http {}: status {} (attempt {}/{})", path, status, attempt + 1, config_.retries + 1);
      continue;
    }
    if (status != 200) throw BackendError("lm http " + path + " returned status " + std::to_string(status), status);
    try {
      return nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::parse_error& e) {
      throw ProtocolError("lm http " + path + ": malformed JSON response: " + e.what());
    }
  }
  throw BackendError("lm http " + path + " failed after " + std::to_string(config_.retries + 1) +
                         " attempts: " + last_error + (status ? " (status " + std::to_string(status) + ")" : ""),
                     status);
}

namespace {

template <class T>
T field(const nlohmann::json& j, const char* key, const char* route) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ProtocolError(std::string("lm http ") + route + ": bad field '" + key + "': " + e.what());
  }
}

}  // namespace

std::string HttpBackend::generate(const std::string& prompt, int max_tokens, const std::vector<std::string>& stop) {
  const auto j = post("/generate", {{"prompt", prompt}, {"max_tokens", max_tokens}, {"stop", stop}, {"temperature", 0}});
  return truncate_at_stop(field<std::string>(j, "text", "/generate"), stop);
}

YesNo HttpBackend::yes_no(const std::string& prompt) {
  const auto j = post("/logprobs", {{"prompt", prompt}, {"candidates", {"Yes", "No"}}});
  const auto lp = field<nlohmann::json>(j, "logprobs", "/logprobs");
  if (!lp.is_object() || !lp.contains("Yes") || !lp.contains("No"))
    throw ProtocolError("lm http /logprobs: response lacks Yes/No log-probabilities");
  return yes_no_from_logprobs(lp["Yes"].get<double>(), lp["No"].get<double>());
}

double HttpBackend::score_choice(const std::string& prompt, const std::string& candidate) {
  return yes_no(prompt + "\nCandidate: " + candidate + ". Is it relevant?").p_yes;
}

Vec HttpBackend::embed(const std::string& text) {
  const auto j = post("/embed", {{"text", text}});
  Vec v = field<Vec>(j, "embedding", "/embed");
  double n = 0;
  for (double x : v) n += x * x;
  if (v.empty() || n == 0) throw ProtocolError("lm http /embed: empty or zero embedding");
  n = std::sqrt(n);
  for (auto& x : v) x /= n;
  return v;
}

}  // namespace pet::lm

#pragma once

#include <memory>
#include <semaphore>
#include <string>

#include "json.hpp"

#include "pet/lm/bridge.hpp"

namespace pet::lm {

struct HttpConfig {
  std::string endpoint;  // e.g. http://127.0.0.1:8080/v1
  std::string token;     // sent as a Bearer token when set
  int retries = 2;       // extra attempts after a 5xx or network failure
  int timeout_ms = 30000;
  int max_inflight = 4;
  int backoff_ms = 100;  // doubled after every failed attempt

  // Fills endpoint and token from PET_LM_ENDPOINT / PET_LM_TOKEN when empty.
  HttpConfig with_env() const;
};

// JSON over HTTP:
//   POST {endpoint}/generate {prompt, max_tokens, stop, temperature}  -> {text}
//   POST {endpoint}/logprobs {prompt, candidates}                     -> {logprobs: {cand: lp}}
//   POST {endpoint}/embed    {text}                                   -> {embedding: [...]}
class HttpBackend : public Backend {
 public:
  explicit HttpBackend(HttpConfig config);
  ~HttpBackend() override;

  std::string generate(const std::string& prompt, int max_tokens, const std::vector<std::string>& stop) override;
  double score_choice(const std::string& prompt, const std::string& candidate) override;
  YesNo yes_no(const std::string& prompt) override;
  Vec embed(const std::string& text) override;

  // Number of HTTP requests sent so far, retries included.
  long attempts() const;

 private:
  nlohmann::json post(const std::string& route, const nlohmann::json& body);

  HttpConfig config_;
  std::string host_;
  std::string prefix_;
  std::counting_semaphore<1024> inflight_;
  struct Counters;
  std::unique_ptr<Counters> counters_;
};

}  // namespace pet::lm

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace pet::lm {

using Vec = std::vector<double>;

struct YesNo {
  double p_yes = 0.5;
  double p_no = 0.5;
};

// Every language-model capability the pipeline uses. Implementations must
// keep scores in [0,1], yes/no pairs summing to 1 and embeddings at unit norm.
class Backend {
 public:
  virtual ~Backend() = default;

  virtual std::string generate(const std::string& prompt, int max_tokens, const std::vector<std::string>& stop) = 0;
  virtual double score_choice(const std::string& prompt, const std::string& candidate) = 0;
  virtual YesNo yes_no(const std::string& prompt) = 0;
  virtual Vec embed(const std::string& text) = 0;
};

class BackendError : public std::runtime_error {
 public:
  explicit BackendError(const std::string& message, int status = 0)
      : std::runtime_error(message), status_(status) {}
  int status() const { return status_; }

 private:
  int status_;
};

class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Softmax over the two answer log-probabilities.
YesNo yes_no_from_logprobs(double logp_yes, double logp_no);

// Cuts `text` at the earliest occurrence of any stop sequence.
std::string truncate_at_stop(const std::string& text, const std::vector<std::string>& stop);

double cosine(const Vec& a, const Vec& b);

}  // namespace pet::lm

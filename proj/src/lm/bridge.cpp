#include "pet/lm/bridge.hpp"

#include <algorithm>
#include <cmath>

namespace pet::lm {

YesNo yes_no_from_logprobs(double logp_yes, double logp_no) {
  if (!std::isfinite(logp_yes) && !std::isfinite(logp_no)) return {0.5, 0.5};
  const double m = std::max(logp_yes, logp_no);
  const double a = std::exp(logp_yes - m);
  const double b = std::exp(logp_no - m);
  return {a / (a + b), b / (a + b)};
}

std::string truncate_at_stop(const std::string& text, const std::vector<std::string>& stop) {
  std::size_t cut = text.size();
  for (const auto& s : stop) {
    if (s.empty()) continue;
    const auto pos = text.find(s);
    if (pos != std::string::npos) cut = std::min(cut, pos);
  }
  return text.substr(0, cut);
}

double cosine(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("cosine: dimension mismatch");
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0 || nb == 0) return 0.0;
  return dot / std::sqrt(na * nb);
}

}  // namespace pet::lm

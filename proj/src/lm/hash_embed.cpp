#include "pet/lm/hash_embed.hpp"

#include <cmath>
#include <stdexcept>

#include "pet/rng.hpp"
#include "pet/text.hpp"

namespace pet::lm {

Vec hash_embed(std::string_view text, int dim) {
  if (dim < 1) throw std::invalid_argument("hash_embed: dimension must be positive");
  Vec out(dim, 0.0);
  const auto tokens = tokenize(text);
  for (const auto& tok : tokens) {
    Rng rng(fnv1a(tok));
    for (auto& v : out) v += 2.0 * rng.uniform() - 1.0;
  }
  double norm = 0;
  for (double v : out) norm += v * v;
  if (tokens.empty() || norm == 0.0) {
    std::fill(out.begin(), out.end(), 0.0);
    out[0] = 1.0;
    return out;
  }
  norm = std::sqrt(norm);
  for (auto& v : out) v /= norm;
  return out;
}

Vec lexical_embed(std::string_view text, int dim, const Phrasebook& pb, const std::vector<std::string>& prefer) {
  return hash_embed(pb.canonical_nouns(text, prefer), dim);
}

}  // namespace pet::lm

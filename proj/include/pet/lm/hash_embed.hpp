#pragma once

#include <string_view>

#include "pet/lm/bridge.hpp"
#include "pet/phrasebook.hpp"

namespace pet::lm {

inline constexpr int kDefaultEmbedDim = 64;

// Bag-of-tokens embedding: each lowercase token seeds a fixed pseudo-random
// vector; the result is the normalized mean. Empty input maps to e_0.
Vec hash_embed(std::string_view text, int dim = kDefaultEmbedDim);

// hash_embed after mapping noun synonyms to class names, so "glass" and
// "cup" land on the same vector while other wording still differs.
Vec lexical_embed(std::string_view text, int dim = kDefaultEmbedDim, const Phrasebook& pb = Phrasebook::builtin(),
                  const std::vector<std::string>& prefer = {});

}  // namespace pet::lm

#pragma once

#include <cstdint>
#include <string>

#include "pet/catalog.hpp"
#include "pet/phrasebook.hpp"

namespace pet::harness {

// Rewrites a goal with a different frame and noun synonyms from the
// phrasebook. Deterministic in (text, seed). Text that does not parse, or a
// phrasebook with nothing to offer, comes back unchanged.
std::string perturb_goal(const std::string& goal_text, std::uint64_t seed,
                         const Phrasebook& pb = Phrasebook::builtin(), const Catalog& catalog = Catalog::builtin());

}  // namespace pet::harness

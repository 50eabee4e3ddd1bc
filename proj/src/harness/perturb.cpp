#include "pet/harness/perturb.hpp"

#include <cctype>

#include "pet/rng.hpp"
#include "pet/text.hpp"

namespace pet::harness {

std::string perturb_goal(const std::string& goal_text, std::uint64_t seed, const Phrasebook& pb,
                         const Catalog& catalog) {
  const auto goal = pb.parse_goal(goal_text, catalog);
  if (!goal) return goal_text;
  const auto& frames = pb.goal_paraphrases(goal->type);
  const auto& osyn = pb.noun_synonyms(goal->object_class);
  const auto& rsyn = pb.noun_synonyms(goal->receptacle_class);
  if (frames.empty() && osyn.empty() && rsyn.empty()) return goal_text;

  Rng rng(mix_seed(fnv1a(goal_text), seed));
  std::string o = goal->object_class;
  std::string r = goal->receptacle_class;
  // A synonym only counts if it reads back as the same class.
  auto swap_noun = [&](std::string& noun, const std::vector<std::string>& syn) {
    if (syn.empty() || !rng.chance(0.5)) return false;
    const std::string& cand = rng.pick(syn);
    auto back = pb.resolve_noun(cand, catalog, {noun});
    if (!back || *back != noun) return false;
    noun = cand;
    return true;
  };
  bool changed = swap_noun(o, osyn);
  changed = swap_noun(r, rsyn) || changed;

  std::string frame;
  if (!frames.empty()) {
    frame = rng.pick(frames);
  } else {
    if (!changed) {
      for (const auto& s : osyn)
        if (pb.resolve_noun(s, catalog, {o}) == goal->object_class) {
          o = s;
          break;
        }
      if (o == goal->object_class)
        for (const auto& s : rsyn)
          if (pb.resolve_noun(s, catalog, {r}) == goal->receptacle_class) {
            r = s;
            break;
          }
    }
    return pb.goal_text(goal->type, o, r);
  }
  std::string out = fill(fill(frame, "o", o), "r", r);
  if (!out.empty()) out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
  if (out.back() != '.' && out.back() != '?') out += '.';
  // Perturbed text must still mean the same task.
  auto check = pb.parse_goal(out, catalog);
  if (!check || check->type != goal->type || check->object_class != goal->object_class ||
      check->receptacle_class != goal->receptacle_class)
    return goal_text;
  return out;
}

}  // namespace pet::harness

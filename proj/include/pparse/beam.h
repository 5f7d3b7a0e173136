#pragma once

#include <span>
#include <vector>

#include "pparse/features.h"
#include "pparse/token.h"
#include "pparse/transition.h"
#include "pparse/tree.h"

namespace pparse {

struct BeamItem {
  Configuration config;
  std::vector<Action> history;
  double score = 0.0;
  bool is_reference = false;
};

struct BeamResult {
  DepTree tree;
  std::vector<Action> actions;
  double score = 0.0;
};

struct ReferenceBeamResult {
  // step at which the reference prefix left the beam; -1 if it survived
  int early_stop_step = -1;
  std::vector<Action> best_actions;  // best item at the stop (or final) step
  double best_score = 0.0;
  bool best_equals_reference = false;
};

// Step-synchronized beam search over the arc-eager system.  Finished items
// stay in the beam and compete by total score.  Ties keep insertion order
// (parent rank, then action order), so results are deterministic.
BeamResult beam_decode(const Sentence& s, const FeatureExtractor& fx,
                       std::span<const double> weights, int beam_size,
                       const ConstraintContext& ctx);

// Unconstrained beam search that tracks the item following `reference`;
// reports the step where that item fell out of the beam, if any.
ReferenceBeamResult beam_decode_with_reference(const Sentence& s,
                                               const FeatureExtractor& fx,
                                               std::span<const double> weights,
                                               int beam_size,
                                               const std::vector<Action>& reference);

// Weight-vector slots touched by the first `count` actions of `actions`,
// replayed from the initial configuration (one slot per feature-action pair,
// duplicates meaning counts).
std::vector<uint32_t> action_sequence_slots(const Sentence& s,
                                            const FeatureExtractor& fx,
                                            const std::vector<Action>& actions,
                                            size_t count);

}  // namespace pparse
